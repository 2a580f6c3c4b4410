"""Normalized record features and the blocking index over targets."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import Callable, Hashable, Iterable

from citematch.model import CitedReference, TargetArticle
from citematch.strmetrics import UnencodableNameError, soundex
from citematch.textnorm import normalize_number, normalize_text, reduce_initials, text_variants

from .rules import CascadeProfile, Field, FieldPredicate, MatchRule, PubNameSources, Test


@dataclass(frozen=True, slots=True)
class Features:
    """One record after profile normalization."""

    id: str
    authors: frozenset[str]
    soundex: frozenset[str]
    initials: str
    year: int | None
    pub_names: frozenset[str]
    volume: str
    start_page: str
    end_page: str
    issue: str
    doi: str
    citations: int = 0

    def numeric(self, fld: Field) -> str:
        if fld is Field.VOLUME:
            return self.volume
        if fld is Field.START_PAGE:
            return self.start_page
        return self.issue


def _soundex_keys(names: Iterable[str]) -> frozenset[str]:
    out = set()
    for n in names:
        try:
            out.add(soundex(n))
        except UnencodableNameError:
            pass
    return frozenset(out)


def _initials(first: str, second: str, profile: CascadeProfile) -> str:
    first, second = reduce_initials(first, second, profile.norm)
    return normalize_text(first + second, profile.norm)


def _target_pub_names(t: TargetArticle, sources: PubNameSources) -> tuple[str, ...]:
    if sources is PubNameSources.FULL:
        return (t.pub_name_full,)
    if sources is PubNameSources.ABBREVS:
        return t.pub_name_abbrevs
    if sources is PubNameSources.ABBREVS_OR_FULL:
        return t.pub_name_abbrevs or (t.pub_name_full,)
    return t.pub_names


def _name_keys(values: Iterable[str], profile: CascadeProfile) -> frozenset[str]:
    keys = set()
    for v in values:
        keys.update(text_variants(v, profile.norm))
    keys.discard("")
    return frozenset(keys)


def target_features(t: TargetArticle, profile: CascadeProfile) -> Features:
    norm = profile.norm
    authors = _name_keys([t.first_author_last], profile)
    return Features(
        id=t.id,
        authors=authors,
        soundex=_soundex_keys(authors),
        initials=_initials(t.first_initial, t.second_initial, profile),
        year=t.pub_year,
        pub_names=_name_keys(_target_pub_names(t, profile.pub_name_sources), profile),
        volume=normalize_number(t.volume, norm),
        start_page=normalize_number(t.start_page, norm),
        end_page=normalize_number(t.end_page, norm),
        issue=normalize_number(t.issue, norm),
        doi=t.doi.strip().lower(),
        citations=t.accumulated_citations,
    )


def reference_features(r: CitedReference, profile: CascadeProfile) -> Features:
    norm = profile.norm
    authors = _name_keys([r.first_author_last], profile)
    return Features(
        id=r.ref_id,
        authors=authors,
        soundex=_soundex_keys(authors),
        initials=_initials(r.first_initial, r.second_initial, profile),
        year=r.pub_year,
        pub_names=_name_keys([r.pub_name], profile),
        volume=normalize_number(r.volume, norm),
        start_page=normalize_number(r.start_page, norm),
        end_page="",
        issue=normalize_number(r.issue, norm),
        doi=r.doi.strip().lower(),
    )


# --- blocking ---------------------------------------------------------------

KeyFn = Callable[[Features], Iterable[Hashable]]

# Higher is more selective; the two best blockable predicates of a rule key it.
_SELECTIVITY = {
    Field.DOI: 100,
    Field.START_PAGE: 90,
    Field.AUTHOR_LAST: 80,
    Field.VOLUME: 60,
    Field.PUB_NAME: 40,
    Field.PUB_YEAR: 30,
    Field.FIRST_INITIAL: 10,
    Field.ISSUE: 5,
}


def _blocking_keys(p: FieldPredicate, rule: MatchRule) -> tuple[KeyFn, KeyFn] | None:
    """(target keys, reference probes) such that a satisfied predicate implies
    a shared key; None when the predicate cannot block."""
    f, t = p.field, p.test
    if t is Test.EXACT:
        if f is Field.AUTHOR_LAST:
            return (lambda x: x.authors), (lambda x: x.authors)
        if f is Field.PUB_NAME:
            return (lambda x: x.pub_names), (lambda x: x.pub_names)
        if f is Field.FIRST_INITIAL:
            return (lambda x: (x.initials,)), (lambda x: (x.initials,))
        if f is Field.PUB_YEAR:
            return (lambda x: (x.year,)), (lambda x: () if x.year is None else (x.year,))
        if f in (Field.VOLUME, Field.START_PAGE):
            return (lambda x: (x.numeric(f),)), (lambda x: (x.numeric(f),))
        if f is Field.DOI and rule.requires_doi:
            return (lambda x: (x.doi,) if x.doi else ()), (lambda x: (x.doi,) if x.doi else ())
        return None
    if t is Test.SOUNDEX_EQUAL:
        return (lambda x: x.soundex), (lambda x: x.soundex)
    if t is Test.YEAR_DELTA:
        deltas = sorted(p.deltas)
        return (lambda x: (x.year,)), (lambda x: () if x.year is None else [x.year + d for d in deltas])
    if t is Test.SWAPPED_WITH:
        other = p.other
        assert other is not None
        return (lambda x: (x.numeric(other),)), (lambda x: (x.numeric(f),) if x.numeric(f) else ())
    return None


@dataclass
class _RulePlan:
    target_fns: tuple[KeyFn, ...]
    probe_fns: tuple[KeyFn, ...]
    table: dict[tuple, list[int]]


def _plan(rule: MatchRule) -> _RulePlan:
    scored = []
    for p in rule.predicates:
        fns = _blocking_keys(p, rule)
        if fns is not None:
            scored.append((-_SELECTIVITY[p.field], p.field.value, fns))
    scored.sort(key=lambda s: (s[0], s[1]))
    chosen = [fns for _, _, fns in scored[:2]]
    return _RulePlan(tuple(c[0] for c in chosen), tuple(c[1] for c in chosen), {})


class TargetIndex:
    """Immutable after construction.

    ``by_ref_year`` maps a reference year to the targets the profile's year
    window admits for it; each rule additionally gets an inverted table keyed
    on its (up to) two most selective blockable predicates.
    """

    def __init__(self, targets: list[TargetArticle], profile: CascadeProfile):
        self.profile = profile
        ordered = sorted(targets, key=lambda t: t.id)
        self.targets: tuple[TargetArticle, ...] = tuple(ordered)
        self.features: tuple[Features, ...] = tuple(target_features(t, profile) for t in ordered)
        self.position = {t.id: i for i, t in enumerate(ordered)}

        by_year: dict[int, list[int]] = defaultdict(list)
        for i, f in enumerate(self.features):
            for d in sorted(profile.year_window):
                # target_year - ref_year == d
                by_year[f.year - d].append(i)  # type: ignore[operator]
        self.by_ref_year = {y: tuple(v) for y, v in by_year.items()}

        self._plans: list[_RulePlan] = []
        for rule in profile.rules:
            plan = _plan(rule)
            if plan.target_fns:
                table: dict[tuple, list[int]] = defaultdict(list)
                for i, f in enumerate(self.features):
                    for key in product(*(fn(f) for fn in plan.target_fns)):
                        table[key].append(i)
                plan.table = dict(table)
            self._plans.append(plan)

    def __len__(self) -> int:
        return len(self.targets)

    def ref_year_keys(self, target_id: str) -> tuple[int, ...]:
        """Reference years under which a target can be retrieved."""
        i = self.position[target_id]
        return tuple(sorted(y for y, pos in self.by_ref_year.items() if i in pos))

    def is_blocked(self, rule_index: int) -> bool:
        return bool(self._plans[rule_index].target_fns)

    def candidates(self, rule_index: int, ref: Features) -> list[int]:
        """Target positions that could satisfy ``rule_index`` for ``ref``, ascending."""
        plan = self._plans[rule_index]
        if not plan.target_fns:
            if ref.year is None:
                return list(range(len(self.features)))
            return list(self.by_ref_year.get(ref.year, ()))
        hits: set[int] = set()
        for key in product(*(fn(ref) for fn in plan.probe_fns)):
            hits.update(plan.table.get(key, ()))
        return sorted(hits)


def build_index(targets: list[TargetArticle], profile: CascadeProfile) -> TargetIndex:
    return TargetIndex(targets, profile)
