"""Scoring match runs against ground truth.

Counting rules, per reference (``expected`` is the target the reference
should link to in the chosen mode, possibly none):

* matched: correct if the selection is ``expected``; otherwise one incorrect
  match, plus a missed match when ``expected`` exists.
* ambiguous: correct if ``expected`` is among the linked targets, and one
  incorrect match if any other target is linked too. In best-case mode an
  ambiguous record containing ``expected`` is simply correct.
* missed: a missed match when ``expected`` exists.

In technical mode a phantom reference expects its phantom target; in the
empirical modes it expects nothing, so linking it is an incorrect match.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from citematch.model import CitedReference, GroundTruthLink, MatchRecord, Outcome, SourceArticle, TargetArticle
from citematch.taxonomy import IacAnnotation, Subcategory, base_code, subcategory_of, subcategory_sizes


class ScoreMode(str, Enum):
    TECHNICAL = "technical"
    EMPIRICAL = "empirical"
    EMPIRICAL_BEST_CASE_AMBIGUOUS = "empirical_best_case_ambiguous"


class MissingLinkError(KeyError):
    def __str__(self) -> str:
        return f"no ground-truth link for reference {self.args[0]!r}"


@dataclass(frozen=True)
class ConfusionCounts:
    correct: int = 0
    incorrect: int = 0
    missed: int = 0
    ambiguous_resolved_correct: int = 0
    ambiguous_containing_correct: int = 0
    phantom_matches: int = 0

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def percent(x: Fraction | None) -> Decimal | None:
    """A ratio as a percentage, rounded half-up to two decimals."""
    if x is None:
        return None
    value = Decimal(x.numerator) * 100 / Decimal(x.denominator)
    return value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def _ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


@dataclass(frozen=True)
class ScoreReport:
    """Exact ratios; ``percent`` gives the rounded display values."""

    mode: ScoreMode
    precision_ratio: Fraction | None
    recall_ratio: Fraction | None
    f1_ratio: Fraction | None

    @property
    def precision(self) -> Decimal | None:
        return percent(self.precision_ratio)

    @property
    def recall(self) -> Decimal | None:
        return percent(self.recall_ratio)

    @property
    def f1(self) -> Decimal | None:
        return percent(self.f1_ratio)


def scores_from_counts(c: ConfusionCounts, mode: ScoreMode = ScoreMode.TECHNICAL) -> ScoreReport:
    p = _ratio(c.correct, c.correct + c.incorrect)
    r = _ratio(c.correct, c.correct + c.missed)
    f1 = _ratio(2 * c.correct, 2 * c.correct + c.incorrect + c.missed)
    if f1 is not None and p is None and r is None:
        f1 = None
    return ScoreReport(mode, p, r, f1)


@dataclass(frozen=True)
class ExclusionList:
    """References and targets to drop before counting (e.g. corrections as
    sources, or double records)."""

    ref_ids: frozenset[str] = frozenset()
    target_ids: frozenset[str] = frozenset()

    @classmethod
    def of(cls, ref_ids: Iterable[str] = (), target_ids: Iterable[str] = ()) -> ExclusionList:
        return cls(frozenset(ref_ids), frozenset(target_ids))


def expected_target(link: GroundTruthLink, mode: ScoreMode) -> str | None:
    if mode is ScoreMode.TECHNICAL and not link.truly_cites:
        return link.phantom_target_id
    return link.true_target_id


def score(
    matches: Sequence[MatchRecord],
    links: Iterable[GroundTruthLink] | Mapping[str, GroundTruthLink],
    mode: ScoreMode = ScoreMode.TECHNICAL,
    *,
    exclude: ExclusionList | None = None,
) -> tuple[ConfusionCounts, ScoreReport]:
    link_map = links if isinstance(links, Mapping) else {lk.ref_id: lk for lk in links}
    ex = exclude or ExclusionList()
    correct = incorrect = missed = resolved = containing = phantom = 0
    for m in matches:
        if m.ref_id in ex.ref_ids:
            continue
        link = link_map.get(m.ref_id)
        if link is None:
            raise MissingLinkError(m.ref_id)
        expected = expected_target(link, mode)
        if expected in ex.target_ids:
            continue
        linked = [t for t in m.linked_targets if t not in ex.target_ids]
        if not linked:
            missed += expected is not None
            continue
        if not link.truly_cites and link.phantom_target_id in linked:
            phantom += 1
        if m.outcome is Outcome.MATCHED:
            if linked[0] == expected:
                correct += 1
                resolved += len(m.matched_targets) > 1
            else:
                incorrect += 1
                missed += expected is not None
            continue
        # ambiguous
        hit = expected in linked
        containing += hit
        if hit:
            correct += 1
        else:
            missed += expected is not None
        if len(linked) > 1 or not hit:
            if not (hit and mode is ScoreMode.EMPIRICAL_BEST_CASE_AMBIGUOUS):
                incorrect += 1
    counts = ConfusionCounts(correct, incorrect, missed, resolved, containing, phantom)
    return counts, scores_from_counts(counts, mode)


def proportions(c: ConfusionCounts) -> tuple[Decimal | None, Decimal | None]:
    """(missed share of correct+missed, incorrect share of correct+incorrect), in percent."""
    return (
        percent(_ratio(c.missed, c.correct + c.missed)),
        percent(_ratio(c.incorrect, c.correct + c.incorrect)),
    )


def iac_frequency_table(annotations: Iterable[IacAnnotation]) -> dict[str, int]:
    """Occurrences per base code, most frequent first (ties by code)."""
    counts: Counter[str] = Counter()
    for a in annotations:
        for code in {base_code(c) for c in a.codes}:
            counts[code] += 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def subcategory_shares(annotations: Iterable[IacAnnotation]) -> dict[Subcategory, Fraction | None]:
    """Per-subcategory counts divided by the subcategory's code count, renormalized."""
    sizes = subcategory_sizes()
    raw: Counter[Subcategory] = Counter()
    for code, n in iac_frequency_table(annotations).items():
        raw[subcategory_of(code)] += n
    weighted = {s: Fraction(raw[s], sizes[s]) for s in Subcategory}
    total = sum(weighted.values())
    if not total:
        return {s: None for s in Subcategory}
    return {s: w / total for s, w in weighted.items()}


# --- domain check -------------------------------------------------------------


def cross_domain_links(
    matches: Iterable[MatchRecord],
    refs: Iterable[CitedReference],
    targets: Iterable[TargetArticle],
    sources: Iterable[SourceArticle],
) -> list[str]:
    """References linked to a target outside their source's domain.

    A link between, say, a neurobiology source and a sociology journal is a
    cue for an extraction phantom; this lists the refs such a check would flag.
    """
    src_of = {r.ref_id: r.source_article_id for r in refs}
    domain_of_src = {s.id: s.domain_tag for s in sources}
    domain_of_tgt = {t.id: t.domain_tag for t in targets}
    flagged = []
    for m in matches:
        d = domain_of_src.get(src_of.get(m.ref_id, ""))
        if d is None:
            continue
        if any(domain_of_tgt.get(t) not in (None, d) for t in m.linked_targets):
            flagged.append(m.ref_id)
    return flagged


# --- profile comparison --------------------------------------------------------

REPORT_COLUMNS = (
    "profile",
    "mode",
    "correct",
    "incorrect",
    "missed",
    "precision",
    "recall",
    "f1",
    "missed_proportion",
    "incorrect_proportion",
    "ambiguous_containing_correct",
    "phantom_matches",
)


@dataclass(frozen=True)
class ProfileResult:
    profile: str
    counts: dict[ScoreMode, ConfusionCounts]
    reports: dict[ScoreMode, ScoreReport]
    missed_refs: frozenset[str]
    missed_iac: dict[str, int]


@dataclass(frozen=True)
class ComparisonReport:
    results: tuple[ProfileResult, ...]
    missed_overlap: dict[tuple[str, str], int] = field(default_factory=dict)

    def rows(self) -> list[dict[str, str]]:
        out = []
        for r in self.results:
            for mode in ScoreMode:
                c, s = r.counts[mode], r.reports[mode]
                mp, ip = proportions(c)
                values = {
                    "profile": r.profile,
                    "mode": mode.value,
                    "correct": c.correct,
                    "incorrect": c.incorrect,
                    "missed": c.missed,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "missed_proportion": mp,
                    "incorrect_proportion": ip,
                    "ambiguous_containing_correct": c.ambiguous_containing_correct,
                    "phantom_matches": c.phantom_matches,
                }
                out.append({k: _fmt(values[k]) for k in REPORT_COLUMNS})
        return out

    def to_delimited(self, sep: str = "\t") -> str:
        lines = [sep.join(REPORT_COLUMNS)]
        lines += [sep.join(row[k] for k in REPORT_COLUMNS) for row in self.rows()]
        lines.append("")
        lines.append(sep.join(("missed_overlap", "profile_a", "profile_b", "shared_missed")))
        for (a, b), n in sorted(self.missed_overlap.items()):
            lines.append(sep.join(("missed_overlap", a, b, str(n))))
        return "\n".join(lines) + "\n"

    def to_table(self, mode: ScoreMode = ScoreMode.TECHNICAL) -> str:
        """One column per profile, rows as in a printed comparison table."""
        names = [r.profile for r in self.results]
        rows: list[tuple[str, list[str]]] = []
        spec = (
            ("Correct matches", lambda c, s: str(c.correct)),
            ("Incorrect matches", lambda c, s: str(c.incorrect)),
            ("Missed matches", lambda c, s: str(c.missed)),
            ("Precision", lambda c, s: _fmt(s.precision)),
            ("Recall", lambda c, s: _fmt(s.recall)),
            ("F1", lambda c, s: _fmt(s.f1)),
        )
        for label, fn in spec:
            rows.append((label, [fn(r.counts[mode], r.reports[mode]) for r in self.results]))
        head = ["", *names]
        body = [[label, *vals] for label, vals in rows]
        widths = [max(len(row[i]) for row in [head, *body]) for i in range(len(head))]

        def line(cells: list[str]) -> str:
            return "  ".join(
                c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))
            ).rstrip()

        out = [f"mode: {mode.value}", line(head), line(["-" * w for w in widths])]
        out += [line(r) for r in body]
        if self.missed_overlap:
            out.append("")
            out.append("missed matches shared between profiles:")
            for (a, b), n in sorted(self.missed_overlap.items()):
                out.append(f"  {a} & {b}: {n}")
        return "\n".join(out) + "\n"


def _fmt(v: object) -> str:
    if v is None:
        return "NA"
    return str(v)


def compare_profiles(
    runs: Mapping[str, Sequence[MatchRecord]],
    links: Iterable[GroundTruthLink],
    *,
    annotations: Mapping[str, Iterable[IacAnnotation]] | None = None,
    exclude: ExclusionList | None = None,
) -> ComparisonReport:
    """Score several profiles' runs over the same references.

    ``runs`` maps a profile name to its match records, in the order the
    profiles should appear.
    """
    if not runs:
        raise ValueError("need at least one profile run")
    link_map = {lk.ref_id: lk for lk in links}
    results = []
    for name, matches in runs.items():
        counts, reports = {}, {}
        for mode in ScoreMode:
            counts[mode], reports[mode] = score(matches, link_map, mode, exclude=exclude)
        missed = frozenset(
            m.ref_id
            for m in matches
            if link_map[m.ref_id].true_target_id is not None
            and link_map[m.ref_id].true_target_id not in m.linked_targets
        )
        iac = iac_frequency_table(annotations.get(name, ())) if annotations else {}
        results.append(ProfileResult(name, counts, reports, missed, iac))
    overlap = {}
    for i, a in enumerate(results):
        for b in results[i + 1 :]:
            overlap[(a.profile, b.profile)] = len(a.missed_refs & b.missed_refs)
    return ComparisonReport(tuple(results), overlap)
