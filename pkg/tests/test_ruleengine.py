from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from citematch.corpusforge import InjectionPlan, forge, generate_clean
from citematch.model import Outcome
from citematch.ruleengine import (
    BUILTIN,
    AmbiguityPolicy,
    ConfigError,
    Field,
    MatchRule,
    Test as PredTest,
    UnknownProfileError,
    build_index,
    builtin_profile,
    load_profile,
    match_corpus,
    match_reference,
    parse_predicate,
    reference_features,
    resolve_profile,
    rule_holds,
)
from conftest import make_ref, make_target

PROFILES = {name: builtin_profile(name) for name in BUILTIN}


def _match(profile: str, ref, *targets):
    idx = build_index(list(targets) or [make_target()], PROFILES[profile])
    return match_reference(ref, idx)


# config


@pytest.mark.parametrize("name", BUILTIN)
def test_builtins_load_and_are_ordered(name):
    p = builtin_profile(name)
    p.check_ordering()
    assert p.name == name
    assert all(pr.is_exact for pr in p.rules[0].predicates if pr.field is not Field.ISSUE)


def test_builtin_policies_and_windows():
    assert PROFILES["strict"].year_window == {0}
    assert PROFILES["cwts"].year_window == {-1, 0, 1}
    assert PROFILES["ifq"].year_window == {0, 1}
    assert PROFILES["cwts"].ambiguity_policy is AmbiguityPolicy.MOST_CITED
    assert PROFILES["ifq"].ambiguity_policy is AmbiguityPolicy.KEEP_AMBIGUOUS
    assert len(PROFILES["strict"].rules) == 1


@pytest.mark.parametrize(
    "spec",
    [
        "exact",
        "omit",
        "fuzzy(lev, prop 0.2, min 1, max 5)",
        "fuzzy(damerau, abs 2)",
        "fuzzy(lev, abs 1, same_length)",
    ],
)
def test_predicate_round_trip(spec):
    assert str(parse_predicate("pub_name", spec)) == spec


def test_numeric_predicates_round_trip():
    assert str(parse_predicate("pub_year", "year_delta(1, -1, 0)")) == "year_delta(-1, 0, 1)"
    assert str(parse_predicate("start_page", "numeric_delta(10)")) == "numeric_delta(10)"
    assert str(parse_predicate("volume", "swapped_with(issue)")) == "swapped_with(issue)"


@pytest.mark.parametrize(
    "fld,spec",
    [
        ("pub_name", "nearly"),
        ("pub_name", "fuzzy(lev)"),
        ("pub_name", "fuzzy(lev, abs 1, wobble)"),
        ("author_last", "year_delta(1)"),
        ("pub_name", "soundex_equal"),
        ("volume", "swapped_with(volume)"),
        ("volume", "exact(1)"),
        ("pub_year", "fuzzy(lev, abs 1)"),
        ("start_page", "numeric_delta(-1)"),
    ],
)
def test_bad_predicates_rejected(fld, spec):
    with pytest.raises(ConfigError):
        parse_predicate(fld, spec)


def _toml(rules: str, **head) -> str:
    base = {
        "schema": '"citematch-cascade/1"',
        "name": '"custom"',
        "ambiguity_policy": '"fail"',
        "year_window": "[0]",
    }
    base.update(head)
    lines = [f"{k} = {v}" for k, v in base.items() if v is not None]
    return "\n".join(lines) + "\n" + rules


ALL_EXACT = """
[[rules]]
author_last = "exact"
first_initial = "exact"
pub_year = "exact"
pub_name = "exact"
volume = "exact"
start_page = "exact"
doi = "exact"
"""


def test_load_custom_profile(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(_toml(ALL_EXACT + '\n[[rules]]\nauthor_last = "soundex_equal"\npub_year = "exact"\n'))
    p = load_profile(path)
    assert p.name == "custom" and len(p.rules) == 2
    assert p.rules[1].predicate(Field.AUTHOR_LAST).test is PredTest.SOUNDEX_EQUAL
    assert resolve_profile(str(path)) == p


@pytest.mark.parametrize(
    "text",
    [
        _toml(ALL_EXACT, schema='"other/1"'),
        _toml(ALL_EXACT, name=None),
        _toml(ALL_EXACT, ambiguity_policy='"coin_flip"'),
        _toml(ALL_EXACT, year_window="[]"),
        _toml(ALL_EXACT + "[norm]\nwobble = true\n"),
        _toml('[[rules]]\nauthor_last = "soundex_equal"\n'),
        _toml(ALL_EXACT + '[[rules]]\nauthor_last = "exact"\n[[rules]]\nauthor_last = "exact"\npub_year = "exact"\n'),
        _toml(ALL_EXACT + '[[rules]]\ncolour = "exact"\n'),
        _toml(ALL_EXACT + '[[rules]]\nrequires_doi = true\nauthor_last = "exact"\n'),
        "not = [valid toml",
    ],
)
def test_bad_profiles_rejected(tmp_path, text):
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_profile(path)


def test_unknown_profile():
    with pytest.raises(UnknownProfileError):
        resolve_profile("scopus")
    with pytest.raises(UnknownProfileError):
        builtin_profile("scopus")


def test_rule_must_cover_every_field():
    with pytest.raises(ConfigError):
        MatchRule(0, (parse_predicate("author_last", "exact"),))


# examples


@pytest.mark.parametrize("name", BUILTIN)
def test_exact_reference_matches_at_rule_zero(name):
    rec = _match(name, make_ref())
    assert rec.outcome is Outcome.MATCHED and rec.selected_target == "T1"
    assert rec.matched_targets == (("T1", 0),)


@pytest.mark.parametrize(
    "name,delta,hit",
    [
        ("cwts", -2, False), ("cwts", -1, True), ("cwts", 0, True), ("cwts", 1, True), ("cwts", 2, False),
        ("ifq", -1, False), ("ifq", 0, True), ("ifq", 1, True), ("ifq", 2, False),
        ("strict", -1, False), ("strict", 0, True), ("strict", 1, False),
    ],
)
def test_year_window(name, delta, hit):
    # delta is target year minus reference year
    ref = make_ref(pub_year=2003 - delta, doi="")
    assert (_match(name, ref).outcome is Outcome.MATCHED) == hit


def test_cwts_page_in_range_and_ifq_numeric_deviation():
    rec = _match("cwts", make_ref(start_page="268", doi=""))
    assert rec.matched_targets == (("T1", 4),)
    rec = _match("ifq", make_ref(start_page="261", doi=""))
    assert rec.outcome is Outcome.MATCHED
    assert _match("strict", make_ref(start_page="268", doi="")).outcome is Outcome.MISSED


def test_cwts_fuzzy_name_and_soundex():
    assert _match("cwts", make_ref(pub_name="HETEROATOM CHEMISTYR", doi="")).outcome is Outcome.MATCHED
    rec = _match("cwts", make_ref(first_author_last="SHY", first_initial="X", pub_year=2004, doi=""))
    assert rec.outcome is Outcome.MATCHED


def test_interchanged_volume_and_issue():
    rec = _match("cwts", make_ref(volume="3", issue="14", doi=""))
    assert rec.outcome is Outcome.MATCHED


def test_doi_rescues_corrupted_reference():
    ref = make_ref(first_author_last="ZZZ", pub_name="NOTHING", volume="99", start_page="1")
    assert _match("cwts", ref).outcome is Outcome.MATCHED
    assert _match("strict", ref).outcome is Outcome.MISSED


def test_ambiguity_policies():
    a = make_target("T1", accumulated_citations=5)
    b = make_target("T2", accumulated_citations=9)
    c = make_target("T0", accumulated_citations=9)
    ref = make_ref(doi="")
    cwts = build_index([a, b, c], PROFILES["cwts"])
    assert match_reference(ref, cwts).selected_target == "T0"
    ifq = build_index([a, b], PROFILES["ifq"])
    rec = match_reference(ref, ifq)
    assert rec.outcome is Outcome.AMBIGUOUS and rec.linked_targets == ("T1", "T2")
    failing = replace(PROFILES["strict"], ambiguity_policy=AmbiguityPolicy.FAIL)
    assert match_reference(ref, build_index([a, b], failing)).outcome is Outcome.MISSED


def test_index_profile_mismatch():
    idx = build_index([make_target()], PROFILES["cwts"])
    with pytest.raises(ValueError):
        match_reference(make_ref(), idx, PROFILES["ifq"])


# properties over generated corpora


def _forged(seed: int, n_targets: int = 120, n_refs: int = 500, rate: float = 0.03):
    plan = InjectionPlan(
        seed=seed,
        per_code_rates={c: rate for c in "BDEFGHIJKMNOQRSTU"},
        multi_inaccuracy_rate=0.3,
        duplicate_target_rate=0.05,
    )
    return forge(generate_clean(n_targets, n_refs, seed), plan).corpus


@pytest.fixture(scope="module")
def forged():
    return _forged(11)


@pytest.mark.parametrize("name", BUILTIN)
def test_index_never_drops_a_satisfying_target(forged, name):
    profile = PROFILES[name]
    idx = build_index(forged.targets, profile)
    for ref in forged.refs[:200]:
        r = reference_features(ref, profile)
        for rule in profile.rules:
            brute = {i for i, t in enumerate(idx.features) if rule_holds(rule, r, t, profile.year_window)}
            assert brute <= set(idx.candidates(rule.rule_index, r)), (ref.ref_id, rule.label)


@pytest.mark.parametrize("name", BUILTIN)
def test_cascade_resolves_at_first_rule_with_hits(forged, name):
    profile = PROFILES[name]
    idx = build_index(forged.targets, profile)
    for ref in forged.refs[:200]:
        rec = match_reference(ref, idx)
        r = reference_features(ref, profile)
        fired = [
            rule.rule_index
            for rule in profile.rules
            if any(rule_holds(rule, r, t, profile.year_window) for t in idx.features)
        ]
        if not fired:
            assert rec.outcome is Outcome.MISSED
        elif rec.matched_targets:
            assert {k for _, k in rec.matched_targets} == {fired[0]}


@pytest.mark.parametrize("name", ["cwts", "ifq"])
def test_longer_cascade_never_loses_matches(forged, name):
    full = PROFILES[name]
    idx_full = build_index(forged.targets, full)
    for cut in (1, len(full.rules) // 2):
        prefix = full.with_rules(full.rules[:cut])
        idx = build_index(forged.targets, prefix)
        for ref in forged.refs[:200]:
            if match_reference(ref, idx).outcome is not Outcome.MISSED:
                assert match_reference(ref, idx_full).outcome is not Outcome.MISSED


def test_strict_soundness_on_clean_corpus():
    corpus = generate_clean(150, 800, seed=3)
    links = corpus.link_map()
    for rec in match_corpus(corpus.refs, build_index(corpus.targets, PROFILES["strict"])):
        if rec.outcome is Outcome.MATCHED:
            assert rec.selected_target == links[rec.ref_id].true_target_id


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_results_invariant_to_target_and_reference_order(seed):
    corpus = _forged(seed, n_targets=60, n_refs=150)
    for name in ("cwts", "ifq"):
        p = PROFILES[name]
        base = {r.ref_id: r for r in match_corpus(corpus.refs, build_index(corpus.targets, p))}
        rng = random.Random(seed)
        targets, refs = list(corpus.targets), list(corpus.refs)
        rng.shuffle(targets)
        rng.shuffle(refs)
        again = {r.ref_id: r for r in match_corpus(refs, build_index(targets, p))}
        assert again == base


@pytest.mark.parametrize("executor", ["thread", "process"])
def test_parallel_equals_sequential(forged, executor):
    idx = build_index(forged.targets, PROFILES["cwts"])
    seq = match_corpus(forged.refs, idx)
    assert match_corpus(forged.refs, idx, workers=3, executor=executor) == seq


def test_unknown_executor(forged):
    idx = build_index(forged.targets, PROFILES["cwts"])
    with pytest.raises(ValueError):
        match_corpus(forged.refs, idx, workers=2, executor="fibers")


def test_index_year_keys():
    t = make_target(pub_year=1998)
    assert build_index([t], PROFILES["cwts"]).ref_year_keys("T1") == (1997, 1998, 1999)
    assert build_index([t], PROFILES["ifq"]).ref_year_keys("T1") == (1997, 1998)
    assert build_index([t], PROFILES["strict"]).ref_year_keys("T1") == (1998,)
    assert len(build_index([], PROFILES["cwts"])) == 0


def test_two_years_off_is_missed_everywhere():
    from citematch.fileio import parse_compact_reference

    ref = parse_compact_reference("SHI DQ, 2005, HETEROATOM CHEM, V14, P266", "R1")
    for name in BUILTIN:
        assert _match(name, ref).outcome is Outcome.MISSED


def test_numeric_delta_rule():
    base = PROFILES["strict"]
    rule = MatchRule.build(
        1,
        {
            "author_last": "exact",
            "first_initial": "exact",
            "pub_year": "exact",
            "pub_name": "exact",
            "volume": "exact",
            "start_page": "numeric_delta(10)",
        },
    )
    profile = base.with_rules([*base.rules, rule])
    t = make_target(start_page="251", end_page="260")
    rec = match_reference(make_ref(t, start_page="261"), build_index([t], profile))
    assert rec.matched_targets == (("T1", 1),)


def test_profile_contrasts():
    t = make_target(pub_year=1998)
    assert _match("strict", make_ref(t, start_page="267", doi=""), t).outcome is Outcome.MISSED
    assert _match("cwts", make_ref(t, pub_year=1997, doi=""), t).outcome is Outcome.MATCHED
    assert _match("ifq", make_ref(t, pub_year=1999, doi=""), t).outcome is Outcome.MISSED


def test_match_corpus_edge_cases(forged):
    idx = build_index(forged.targets, PROFILES["ifq"])
    assert match_corpus([], idx) == []
    assert match_corpus(forged.refs, idx) == match_corpus(forged.refs, idx)
    rev = list(reversed(forged.refs))
    assert match_corpus(rev, idx) == list(reversed(match_corpus(forged.refs, idx)))
