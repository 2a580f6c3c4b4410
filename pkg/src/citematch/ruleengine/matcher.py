"""The cascade matcher: first rule with a candidate wins."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Sequence

from citematch.model import CitedReference, MatchRecord, Outcome, TargetArticle
from citematch.strmetrics import numeric_deviation_ok, within_threshold

from .index import Features, TargetIndex, build_index, reference_features
from .rules import AmbiguityPolicy, CascadeProfile, Field, FieldPredicate, MatchRule, Test


def _text_values(x: Features, f: Field) -> frozenset[str] | tuple[str, ...]:
    if f is Field.AUTHOR_LAST:
        return x.authors
    if f is Field.PUB_NAME:
        return x.pub_names
    if f is Field.FIRST_INITIAL:
        return (x.initials,)
    return (x.numeric(f),)


def predicate_holds(p: FieldPredicate, r: Features, t: Features) -> bool:
    f, test = p.field, p.test
    if test is Test.OMIT:
        return True
    if test is Test.EXACT:
        if f is Field.AUTHOR_LAST:
            return not r.authors.isdisjoint(t.authors)
        if f is Field.PUB_NAME:
            return not r.pub_names.isdisjoint(t.pub_names)
        if f is Field.FIRST_INITIAL:
            return r.initials == t.initials
        if f is Field.PUB_YEAR:
            return r.year is not None and r.year == t.year
        if f is Field.DOI:
            return not (r.doi and t.doi) or r.doi == t.doi
        if f is Field.ISSUE:
            return not (r.issue and t.issue) or r.issue == t.issue
        return r.numeric(f) == t.numeric(f)
    if test is Test.YEAR_DELTA:
        return r.year is not None and (t.year - r.year) in p.deltas  # type: ignore[operator]
    if test is Test.SOUNDEX_EQUAL:
        return not r.soundex.isdisjoint(t.soundex)
    if test is Test.PAGE_IN_RANGE:
        page = r.start_page
        if page and page == t.start_page:
            return True
        if not (page.isdigit() and t.start_page.isdigit() and t.end_page.isdigit()):
            return False
        return int(t.start_page) <= int(page) <= int(t.end_page)
    if test is Test.NUMERIC_DELTA:
        return numeric_deviation_ok(r.numeric(f), t.numeric(f), p.max_delta)
    if test is Test.SWAPPED_WITH:
        assert p.other is not None
        value = r.numeric(f)
        return bool(value) and value == t.numeric(p.other)
    # fuzzy: both sides must carry a value
    assert p.metric is not None and p.threshold is not None
    for a in _text_values(r, f):
        if not a:
            continue
        for b in _text_values(t, f):
            if not b or (p.same_length and len(a) != len(b)):
                continue
            if within_threshold(a, b, p.metric, p.threshold):
                return True
    return False


def rule_holds(rule: MatchRule, r: Features, t: Features, window: frozenset[int]) -> bool:
    """Year-window pre-filter plus every predicate of ``rule``."""
    if r.year is not None and (t.year - r.year) not in window:  # type: ignore[operator]
        return False
    if rule.requires_doi and not (r.doi and t.doi):
        return False
    return all(predicate_holds(p, r, t) for p in rule.predicates)


def resolve(
    ref_id: str,
    hits: Sequence[Features],
    rule_index: int,
    policy: AmbiguityPolicy,
) -> MatchRecord:
    """Turn the same-rule hits of one reference into a record."""
    hits = sorted(hits, key=lambda f: f.id)
    pairs = tuple((h.id, rule_index) for h in hits)
    if len(hits) == 1:
        return MatchRecord(ref_id, Outcome.MATCHED, pairs, hits[0].id)
    if policy is AmbiguityPolicy.MOST_CITED:
        best = min(hits, key=lambda f: (-f.citations, f.id))
        return MatchRecord(ref_id, Outcome.MATCHED, pairs, best.id)
    if policy is AmbiguityPolicy.KEEP_AMBIGUOUS:
        return MatchRecord(ref_id, Outcome.AMBIGUOUS, pairs)
    return MatchRecord(ref_id, Outcome.MISSED)


def _check_profile(idx: TargetIndex, profile: CascadeProfile | None) -> CascadeProfile:
    if profile is not None and profile != idx.profile:
        raise ValueError(f"index was built for profile {idx.profile.name!r}, not {profile.name!r}")
    return idx.profile


def match_reference(
    ref: CitedReference, idx: TargetIndex, profile: CascadeProfile | None = None
) -> MatchRecord:
    profile = _check_profile(idx, profile)
    r = reference_features(ref, profile)
    window = profile.year_window
    for rule in profile.rules:
        hits = [
            idx.features[i]
            for i in idx.candidates(rule.rule_index, r)
            if rule_holds(rule, r, idx.features[i], window)
        ]
        if hits:
            return resolve(ref.ref_id, hits, rule.rule_index, profile.ambiguity_policy)
    return MatchRecord(ref.ref_id, Outcome.MISSED)


# process-pool workers rebuild the index once instead of unpickling closures
_WORKER_INDEX: TargetIndex | None = None


def _init_worker(targets: list[TargetArticle], profile: CascadeProfile) -> None:
    global _WORKER_INDEX
    _WORKER_INDEX = build_index(targets, profile)


def _match_chunk(refs: list[CitedReference]) -> list[MatchRecord]:
    assert _WORKER_INDEX is not None
    return [match_reference(r, _WORKER_INDEX) for r in refs]


def match_corpus(
    refs: Sequence[CitedReference],
    idx: TargetIndex,
    profile: CascadeProfile | None = None,
    *,
    workers: int = 1,
    executor: str = "process",
) -> list[MatchRecord]:
    """Match every reference; output order equals input order.

    ``workers > 1`` splits the references into contiguous chunks handled by a
    process (default) or thread pool. Results are identical to a sequential
    run because no state is shared between references.
    """
    profile = _check_profile(idx, profile)
    refs = list(refs)
    if workers <= 1 or len(refs) < 2:
        return [match_reference(r, idx) for r in refs]
    workers = min(workers, os.cpu_count() or 1, len(refs)) if executor == "process" else workers
    size = -(-len(refs) // (workers * 4))
    chunks = [refs[i : i + size] for i in range(0, len(refs), size)]
    if executor == "thread":
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda c: [match_reference(r, idx) for r in c], chunks)
            return [rec for part in parts for rec in part]
    if executor != "process":
        raise ValueError(f"unknown executor {executor!r}")
    if workers <= 1:
        return [match_reference(r, idx) for r in refs]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(list(idx.targets), profile)
    ) as pool:
        return [rec for part in pool.map(_match_chunk, chunks) for rec in part]
