"""Declarative matching rules and cascade profiles."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from citematch.strmetrics import Metric, MetricThreshold, ThresholdKind
from citematch.textnorm import NormProfile


class Field(str, Enum):
    AUTHOR_LAST = "author_last"
    FIRST_INITIAL = "first_initial"
    PUB_YEAR = "pub_year"
    PUB_NAME = "pub_name"
    VOLUME = "volume"
    START_PAGE = "start_page"
    ISSUE = "issue"
    DOI = "doi"


NUMERIC_FIELDS = frozenset({Field.VOLUME, Field.START_PAGE, Field.ISSUE})
SWAPPABLE_FIELDS = NUMERIC_FIELDS
# fields whose "exact" test passes when either side is empty
OPTIONAL_FIELDS = frozenset({Field.ISSUE, Field.DOI})
# fields a DOI match stands in for inside a requires_doi rule
DOI_COVERED_FIELDS = frozenset({Field.AUTHOR_LAST, Field.PUB_NAME, Field.VOLUME, Field.START_PAGE})


class Test(str, Enum):
    EXACT = "exact"
    FUZZY = "fuzzy"
    SOUNDEX_EQUAL = "soundex_equal"
    YEAR_DELTA = "year_delta"
    PAGE_IN_RANGE = "page_in_range"
    NUMERIC_DELTA = "numeric_delta"
    OMIT = "omit"
    SWAPPED_WITH = "swapped_with"


class AmbiguityPolicy(str, Enum):
    MOST_CITED = "most_cited"
    KEEP_AMBIGUOUS = "keep_ambiguous"
    FAIL = "fail"


class PubNameSources(str, Enum):
    """Which target publication names a reference's name is compared with."""

    FULL = "full"
    ABBREVS = "abbrevs"
    ABBREVS_OR_FULL = "abbrevs_or_full"
    FULL_AND_ABBREVS = "full_and_abbrevs"


class ConfigError(ValueError):
    """Malformed predicate, rule or cascade definition."""


@dataclass(frozen=True)
class FieldPredicate:
    field: Field
    test: Test
    metric: Metric | None = None
    threshold: MetricThreshold | None = None
    same_length: bool = False
    deltas: frozenset[int] = frozenset()
    max_delta: int = 0
    other: Field | None = None

    def __post_init__(self) -> None:
        t, f = self.test, self.field
        if t is Test.YEAR_DELTA and (f is not Field.PUB_YEAR or not self.deltas):
            raise ConfigError("year_delta needs a non-empty delta set and applies to pub_year only")
        if t is Test.PAGE_IN_RANGE and f is not Field.START_PAGE:
            raise ConfigError("page_in_range applies to start_page only")
        if t is Test.SOUNDEX_EQUAL and f is not Field.AUTHOR_LAST:
            raise ConfigError("soundex_equal applies to author_last only")
        if t is Test.SWAPPED_WITH and (
            f not in SWAPPABLE_FIELDS or self.other not in SWAPPABLE_FIELDS or self.other is f
        ):
            raise ConfigError("swapped_with links two distinct fields of volume/start_page/issue")
        if t is Test.FUZZY and (self.metric is None or self.threshold is None):
            raise ConfigError("fuzzy needs a metric and a threshold")
        if t is Test.FUZZY and f in (Field.PUB_YEAR, Field.DOI):
            raise ConfigError(f"fuzzy is not supported on {f.value}")
        if t is Test.NUMERIC_DELTA and (f not in NUMERIC_FIELDS or self.max_delta < 0):
            raise ConfigError("numeric_delta applies to volume/start_page/issue with max >= 0")

    @property
    def is_exact(self) -> bool:
        return self.test is Test.EXACT

    @property
    def is_omit(self) -> bool:
        return self.test is Test.OMIT

    def __str__(self) -> str:
        t = self.test
        if t is Test.FUZZY:
            th = self.threshold
            assert th is not None and self.metric is not None
            if th.kind is ThresholdKind.ABSOLUTE_EDITS:
                parts = [f"abs {_num(th.value)}"]
            else:
                parts = [f"prop {_num(th.value)}"]
                if th.min_edits:
                    parts.append(f"min {th.min_edits}")
                if th.max_edits is not None:
                    parts.append(f"max {th.max_edits}")
            if self.same_length:
                parts.append("same_length")
            return f"fuzzy({self.metric.value}, {', '.join(parts)})"
        if t is Test.YEAR_DELTA:
            return f"year_delta({', '.join(str(d) for d in sorted(self.deltas))})"
        if t is Test.NUMERIC_DELTA:
            return f"numeric_delta({self.max_delta})"
        if t is Test.SWAPPED_WITH:
            assert self.other is not None
            return f"swapped_with({self.other.value})"
        return t.value


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


_CALL = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def parse_predicate(fld: Field | str, spec: str) -> FieldPredicate:
    """Parse the compact predicate notation used in cascade files.

    >>> str(parse_predicate("pub_name", "fuzzy(lev, prop 0.2, min 1, max 5)"))
    'fuzzy(lev, prop 0.2, min 1, max 5)'
    """
    fld = Field(fld)
    m = _CALL.match(spec)
    if not m:
        raise ConfigError(f"{fld.value}: cannot parse predicate {spec!r}")
    name, args = m.group(1), m.group(2)
    try:
        test = Test(name)
    except ValueError:
        raise ConfigError(f"{fld.value}: unknown test {name!r}") from None
    argv = [a.strip() for a in args.split(",")] if args and args.strip() else []

    if test in (Test.EXACT, Test.OMIT, Test.SOUNDEX_EQUAL, Test.PAGE_IN_RANGE):
        if argv:
            raise ConfigError(f"{fld.value}: {name} takes no arguments")
        return FieldPredicate(fld, test)
    try:
        if test is Test.YEAR_DELTA:
            return FieldPredicate(fld, test, deltas=frozenset(int(a) for a in argv))
        if test is Test.NUMERIC_DELTA:
            (arg,) = argv
            return FieldPredicate(fld, test, max_delta=int(arg))
        if test is Test.SWAPPED_WITH:
            (arg,) = argv
            return FieldPredicate(fld, test, other=Field(arg))
        return _parse_fuzzy(fld, argv)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{fld.value}: bad arguments in {spec!r}: {exc}") from None


def _parse_fuzzy(fld: Field, argv: list[str]) -> FieldPredicate:
    if not argv:
        raise ConfigError(f"{fld.value}: fuzzy needs a metric")
    metric = Metric(argv[0])
    kind: ThresholdKind | None = None
    value = 0.0
    lo, hi, same_length = 0, None, False
    for arg in argv[1:]:
        key, _, val = arg.partition(" ")
        val = val.strip()
        if key == "abs":
            kind, value = ThresholdKind.ABSOLUTE_EDITS, float(val)
        elif key == "prop":
            kind, value = ThresholdKind.LENGTH_PROPORTIONAL, float(val)
        elif key == "min":
            lo = int(val)
        elif key == "max":
            hi = int(val)
        elif key == "same_length" and not val:
            same_length = True
        else:
            raise ConfigError(f"{fld.value}: unknown fuzzy option {arg!r}")
    if kind is None:
        raise ConfigError(f"{fld.value}: fuzzy needs 'abs N' or 'prop R'")
    return FieldPredicate(
        fld,
        Test.FUZZY,
        metric=metric,
        threshold=MetricThreshold(kind, value, lo, hi),
        same_length=same_length,
    )


@dataclass(frozen=True)
class MatchRule:
    rule_index: int
    predicates: tuple[FieldPredicate, ...]
    requires_doi: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        fields = [p.field for p in self.predicates]
        if sorted(fields) != sorted(Field) or len(set(fields)) != len(Field):
            raise ConfigError(f"rule {self.rule_index}: predicates must cover every field exactly once")
        if self.requires_doi and self.predicate(Field.DOI).test is not Test.EXACT:
            raise ConfigError(f"rule {self.rule_index}: requires_doi needs doi = exact")

    def predicate(self, fld: Field) -> FieldPredicate:
        for p in self.predicates:
            if p.field is fld:
                return p
        raise KeyError(fld)

    def strictness(self) -> tuple[int, int]:
        """(exact predicates, other non-omitted predicates).

        In a ``requires_doi`` rule the DOI equality counts as an exact match on
        the author, publication name, volume and page it stands in for.
        """
        exact = fuzzy = 0
        for p in self.predicates:
            if p.is_exact or (self.requires_doi and p.field in DOI_COVERED_FIELDS):
                exact += 1
            elif not p.is_omit:
                fuzzy += 1
        return exact, fuzzy

    @classmethod
    def build(
        cls,
        rule_index: int,
        specs: dict[str, str],
        *,
        requires_doi: bool = False,
        label: str = "",
    ) -> MatchRule:
        unknown = set(specs) - {f.value for f in Field}
        if unknown:
            raise ConfigError(f"rule {rule_index}: unknown fields {sorted(unknown)}")
        preds = tuple(parse_predicate(f, specs.get(f.value, "omit")) for f in Field)
        return cls(rule_index, preds, requires_doi, label)


@dataclass(frozen=True)
class CascadeProfile:
    name: str
    norm: NormProfile
    rules: tuple[MatchRule, ...]
    ambiguity_policy: AmbiguityPolicy
    year_window: frozenset[int]
    pub_name_sources: PubNameSources = PubNameSources.FULL_AND_ABBREVS
    version: str = ""
    description: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.rules:
            raise ConfigError(f"profile {self.name}: needs at least one rule")
        if not self.year_window:
            raise ConfigError(f"profile {self.name}: empty year window")
        for i, rule in enumerate(self.rules):
            if rule.rule_index != i:
                raise ConfigError(f"profile {self.name}: rule {i} carries index {rule.rule_index}")
        first = self.rules[0]
        loose = [p.field.value for p in first.predicates if not p.is_exact and p.field is not Field.ISSUE]
        if loose or first.requires_doi or first.predicate(Field.ISSUE).test not in (Test.EXACT, Test.OMIT):
            raise ConfigError(f"profile {self.name}: rule 0 must be all-exact")

    def check_ordering(self) -> None:
        """Raise unless rules are ordered by non-increasing strictness."""
        keys = [r.strictness() for r in self.rules]
        for i in range(1, len(keys)):
            if keys[i] > keys[i - 1]:
                raise ConfigError(
                    f"profile {self.name}: rule {i} {keys[i]} is stricter than rule {i - 1} {keys[i - 1]}"
                )

    def with_rules(self, rules: list[MatchRule] | tuple[MatchRule, ...]) -> CascadeProfile:
        from dataclasses import replace

        renumbered = tuple(replace(r, rule_index=i) for i, r in enumerate(rules))
        return replace(self, rules=renumbered)
