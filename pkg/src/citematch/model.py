"""Domain records shared across the package.

All records are frozen dataclasses. Optional bibliographic values (issue,
DOI, second initial, end page) are empty strings when absent; only the
reference publication year uses ``None`` for "absent", because year takes
part in numeric rules.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

YEAR_MIN = 1800
YEAR_MAX = 2100


class Domain(str, Enum):
    NATURAL_SCIENCES = "natural_sciences"
    SOCIAL_SCIENCES_HUMANITIES = "social_sciences_humanities"


class Outcome(str, Enum):
    MATCHED = "matched"
    AMBIGUOUS = "ambiguous"
    MISSED = "missed"


@dataclass(frozen=True)
class Author:
    last: str
    initials: str = ""


@dataclass(frozen=True)
class TargetArticle:
    id: str
    first_author_last: str
    first_initial: str
    second_initial: str
    all_authors: tuple[Author, ...]
    pub_year: int
    pub_name_full: str
    pub_name_abbrevs: tuple[str, ...]
    volume: str
    issue: str
    start_page: str
    end_page: str
    doi: str
    article_title: str
    domain_tag: Domain
    accumulated_citations: int

    @property
    def primary_pub_name(self) -> str:
        """The name a WoS-style reference would normally carry."""
        return self.pub_name_abbrevs[0] if self.pub_name_abbrevs else self.pub_name_full

    @property
    def pub_names(self) -> tuple[str, ...]:
        return (self.pub_name_full, *self.pub_name_abbrevs)


@dataclass(frozen=True)
class CitedReference:
    ref_id: str
    source_article_id: str
    first_author_last: str
    first_initial: str
    second_initial: str
    pub_year: int | None
    pub_name: str
    volume: str
    issue: str
    start_page: str
    doi: str


@dataclass(frozen=True)
class GroundTruthLink:
    """Ground truth for one reference.

    ``truly_cites=False`` models an extraction phantom: the reference fields
    point at ``phantom_target_id`` although the source never cited it. Such
    links carry ``true_target_id=None``.
    """

    ref_id: str
    true_target_id: str | None
    truly_cites: bool = True
    phantom_target_id: str | None = None


@dataclass(frozen=True)
class SourceArticle:
    id: str
    domain_tag: Domain


@dataclass(frozen=True)
class MatchRecord:
    ref_id: str
    outcome: Outcome
    matched_targets: tuple[tuple[str, int], ...] = ()
    selected_target: str | None = None

    def __post_init__(self) -> None:
        if self.outcome is Outcome.MATCHED:
            if self.selected_target is None:
                raise ValueError(f"{self.ref_id}: matched record needs a selected target")
        elif self.outcome is Outcome.MISSED:
            if self.matched_targets or self.selected_target is not None:
                raise ValueError(f"{self.ref_id}: missed record cannot carry targets")
        else:
            rules = {rule for _, rule in self.matched_targets}
            if len(self.matched_targets) < 2 or len(rules) != 1:
                raise ValueError(
                    f"{self.ref_id}: ambiguous record needs >=2 targets from one rule"
                )

    @property
    def rule_index(self) -> int | None:
        return self.matched_targets[0][1] if self.matched_targets else None

    @property
    def linked_targets(self) -> tuple[str, ...]:
        """Targets the record actually links the reference to."""
        if self.outcome is Outcome.MATCHED:
            return (self.selected_target,)  # type: ignore[return-value]
        if self.outcome is Outcome.AMBIGUOUS:
            return tuple(t for t, _ in self.matched_targets)
        return ()


@dataclass
class Corpus:
    targets: list[TargetArticle] = field(default_factory=list)
    refs: list[CitedReference] = field(default_factory=list)
    links: list[GroundTruthLink] = field(default_factory=list)
    sources: list[SourceArticle] = field(default_factory=list)

    def target_map(self) -> dict[str, TargetArticle]:
        return {t.id: t for t in self.targets}

    def link_map(self) -> dict[str, GroundTruthLink]:
        return {lk.ref_id: lk for lk in self.links}


@dataclass(frozen=True, order=True)
class Violation:
    kind: str
    subject: str
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def kinds(self) -> Counter[str]:
        return Counter(v.kind for v in self.violations)


def _numeric(s: str) -> int | None:
    return int(s) if s.isdigit() else None


def _duplicates(ids: Iterable[str]) -> list[str]:
    return sorted(k for k, n in Counter(ids).items() if n > 1)


def validate_corpus(
    targets: list[TargetArticle],
    refs: list[CitedReference],
    links: list[GroundTruthLink],
    sources: list[SourceArticle] | None = None,
) -> ValidationReport:
    """Collect every invariant violation; the result is sorted so it does not
    depend on input order."""
    out: set[Violation] = set()
    target_ids = {t.id for t in targets}
    ref_ids = {r.ref_id for r in refs}

    for dup in _duplicates(t.id for t in targets):
        out.add(Violation("duplicate_target_id", dup))
    for dup in _duplicates(r.ref_id for r in refs):
        out.add(Violation("duplicate_ref_id", dup))
    for dup in _duplicates(lk.ref_id for lk in links):
        out.add(Violation("duplicate_link", dup))

    for t in targets:
        if not YEAR_MIN <= t.pub_year <= YEAR_MAX:
            out.add(Violation("year_out_of_range", t.id, str(t.pub_year)))
        start, end = _numeric(t.start_page), _numeric(t.end_page)
        if start is not None and end is not None and end < start:
            out.add(Violation("page_range_inverted", t.id, f"{t.start_page}-{t.end_page}"))
        if t.accumulated_citations < 0:
            out.add(Violation("negative_citations", t.id))
    for r in refs:
        if r.pub_year is not None and not YEAR_MIN <= r.pub_year <= YEAR_MAX:
            out.add(Violation("year_out_of_range", r.ref_id, str(r.pub_year)))

    if sources is not None:
        source_ids = {s.id for s in sources}
        for dup in _duplicates(s.id for s in sources):
            out.add(Violation("duplicate_source_id", dup))
        for r in refs:
            if r.source_article_id not in source_ids:
                out.add(Violation("dangling_source", r.ref_id, r.source_article_id))

    for lk in links:
        if lk.ref_id not in ref_ids:
            out.add(Violation("dangling_link_ref", lk.ref_id))
        if lk.true_target_id is not None and lk.true_target_id not in target_ids:
            out.add(Violation("dangling_link_target", lk.ref_id, lk.true_target_id))
        if lk.phantom_target_id is not None and lk.phantom_target_id not in target_ids:
            out.add(Violation("dangling_link_target", lk.ref_id, lk.phantom_target_id))
        if not lk.truly_cites and (lk.true_target_id is not None or lk.phantom_target_id is None):
            out.add(Violation("phantom_link_shape", lk.ref_id))
    return ValidationReport(tuple(sorted(out)))
