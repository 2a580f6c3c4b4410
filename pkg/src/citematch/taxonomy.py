"""Inaccuracy codes (IACs) and a rule-based classifier for field discrepancies.

Codes are plain strings: one letter, plus a digit for the interchanged-field
subtypes G1-G7 (the digit names the field *holding* the foreign value).
Subcategory membership is a fixed table; see ``IAC_TABLE``.

Classification order, for one discrepant field:

1. cross-field checks, all of which may fire: G (value belongs to another
   field), M (part of a compound surname turned into an initial), O (value
   belongs to a co-author);
2. the first field-local code that fires, in the order
   E F S H T I U K Q R N J;
3. only when nothing above fired: B if the Levenshtein distance is at most 2,
   else D.

Comparison is case-insensitive throughout.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from citematch.model import Author, CitedReference, GroundTruthLink, MatchRecord, TargetArticle
from citematch.strmetrics import levenshtein
from citematch.textnorm import expand_umlauts, fold_diacritics

AUTHOR_LAST = "author_last"
FIRST_INITIAL = "first_initial"
SECOND_INITIAL = "second_initial"
PUB_YEAR = "pub_year"
PUB_NAME = "pub_name"
VOLUME = "volume"
START_PAGE = "start_page"
ISSUE = "issue"
END_PAGE = "end_page"

ASSESSED_FIELDS = (AUTHOR_LAST, FIRST_INITIAL, SECOND_INITIAL, PUB_YEAR, PUB_NAME, VOLUME, START_PAGE, ISSUE)

_TEXT = frozenset({AUTHOR_LAST, PUB_NAME})
_INITIALS = frozenset({FIRST_INITIAL, SECOND_INITIAL})
_NUMBERS = frozenset({PUB_YEAR, VOLUME, START_PAGE, ISSUE})
_ALL = _TEXT | _INITIALS | _NUMBERS


class Subcategory(str, Enum):
    SPELLING_VARIATIONS = "spelling_variations"
    COMPLETELY_INCORRECT = "completely_incorrect"
    MISSING_DATA_VALUES = "missing_data_values"
    DISARRANGED_DATA_VALUES = "disarranged_data_values"
    ABBREVIATED_DATA_VALUES = "abbreviated_data_values"
    INCORRECT_INTERPRETATION = "incorrect_interpretation"
    ADDED_DATA_VALUES = "added_data_values"
    OTHER_VARIATIONS = "other_variations"


@dataclass(frozen=True)
class IacCode:
    code: str
    name: str
    subcategory: Subcategory
    field_scope: frozenset[str]
    example: tuple[str, str]


_S = Subcategory
IAC_TABLE: dict[str, IacCode] = {
    c.code: c
    for c in (
        IacCode("B", "Spelling error", _S.SPELLING_VARIATIONS, _ALL, ("Arduengo", "Aduengo")),
        IacCode(
            "D",
            "Completely incorrect",
            _S.COMPLETELY_INCORRECT,
            _ALL,
            ("Journal of Curriculum Studies", "Studies in Higher Education"),
        ),
        IacCode("E", "Omitted", _S.MISSING_DATA_VALUES, _ALL, ("Pant, HA", "Pant, H")),
        IacCode("F", "Cropped", _S.MISSING_DATA_VALUES, _TEXT | _NUMBERS, ("P827", "P82")),
        IacCode(
            "G",
            "Interchanged fields",
            _S.DISARRANGED_DATA_VALUES,
            frozenset({VOLUME, START_PAGE, ISSUE}) | _INITIALS | {AUTHOR_LAST},
            ("V37, P52", "V52, P1"),
        ),
        IacCode("H", "Jumbled value", _S.DISARRANGED_DATA_VALUES, _TEXT | _NUMBERS, ("P654", "P564")),
        IacCode("I", "Abbreviation", _S.ABBREVIATED_DATA_VALUES, frozenset({PUB_NAME}), ("Chem unserer Zeit", "Chem Z")),
        IacCode("J", "Partially incorrect", _S.COMPLETELY_INCORRECT, _TEXT, ("Giessler", "GoetzGiessler")),
        IacCode("K", "Space", _S.OTHER_VARIATIONS, _TEXT, ("De Castell", "DeCastell")),
        IacCode(
            "M",
            "Incorrect interpretation of author names",
            _S.INCORRECT_INTERPRETATION,
            _INITIALS | {AUTHOR_LAST},
            ("Garcia-Elias M", "Elias MG"),
        ),
        IacCode(
            "N",
            "Additional information",
            _S.ADDED_DATA_VALUES,
            _TEXT,
            ("Deut Med Wochenschr", "In press Deut Med Wochenschr"),
        ),
        IacCode(
            "O",
            "Incorrect order of authors",
            _S.DISARRANGED_DATA_VALUES,
            _INITIALS | {AUTHOR_LAST},
            ("Raghunathan, R", "Shanmugasundara M"),
        ),
        IacCode("Q", "Special character", _S.OTHER_VARIATIONS, _TEXT, ("Köster", "Koster")),
        IacCode("R", "Punctuation", _S.OTHER_VARIATIONS, _TEXT | _INITIALS, ("Vobruba G.", "Vobruba G")),
        IacCode("S", "Padded", _S.ADDED_DATA_VALUES, _TEXT | {VOLUME, START_PAGE, ISSUE}, ("V30", "V300")),
        IacCode("T", "Plus/Minus", _S.SPELLING_VARIATIONS, _NUMBERS, ("P251", "P261")),
        IacCode("U", "Full first name", _S.ADDED_DATA_VALUES, _INITIALS, ("Brauninger T", "Brauninger Thomas")),
    )
}

G_SUBTYPE_BY_FIELD = {
    ISSUE: "G1",
    START_PAGE: "G2",
    END_PAGE: "G3",
    VOLUME: "G4",
    AUTHOR_LAST: "G5",
    FIRST_INITIAL: "G6",
    SECOND_INITIAL: "G7",
}

FIELD_LOCAL_ORDER = ("E", "F", "S", "H", "T", "I", "U", "K", "Q", "R", "N", "J")
CROSS_FIELD_CODES = ("G", "M", "O")


def base_code(code: str) -> str:
    return code[:1]


def subcategory_of(code: str) -> Subcategory:
    return IAC_TABLE[base_code(code)].subcategory


def subcategory_sizes() -> dict[Subcategory, int]:
    sizes = {s: 0 for s in Subcategory}
    for c in IAC_TABLE.values():
        sizes[c.subcategory] += 1
    return sizes


@dataclass(frozen=True)
class FieldContext:
    """Both records' full field tuples, for the cross-field checks."""

    expected: Mapping[str, str]
    observed: Mapping[str, str]
    coauthors: tuple[Author, ...] = ()


def expected_fields(t: TargetArticle) -> dict[str, str]:
    return {
        AUTHOR_LAST: t.first_author_last,
        FIRST_INITIAL: t.first_initial,
        SECOND_INITIAL: t.second_initial,
        PUB_YEAR: str(t.pub_year),
        PUB_NAME: t.primary_pub_name,
        VOLUME: t.volume,
        START_PAGE: t.start_page,
        ISSUE: t.issue,
        END_PAGE: t.end_page,
    }


def observed_fields(r: CitedReference) -> dict[str, str]:
    return {
        AUTHOR_LAST: r.first_author_last,
        FIRST_INITIAL: r.first_initial,
        SECOND_INITIAL: r.second_initial,
        PUB_YEAR: "" if r.pub_year is None else str(r.pub_year),
        PUB_NAME: r.pub_name,
        VOLUME: r.volume,
        START_PAGE: r.start_page,
        ISSUE: r.issue,
    }


def context_for(t: TargetArticle, r: CitedReference) -> FieldContext:
    return FieldContext(expected_fields(t), observed_fields(r), tuple(t.all_authors[1:]))


# --- predicates ---------------------------------------------------------------

_TOKEN = re.compile(r"[^\W_]+")
_WS = re.compile(r"\s+")


def _canon(s: str) -> str:
    return _WS.sub(" ", s.strip().casefold())


def _tokens(s: str) -> list[str]:
    return _TOKEN.findall(s)


def _is_subsequence(small: Sequence[str], big: Sequence[str]) -> bool:
    it = iter(big)
    return all(any(x == y for y in it) for x in small)


def _omitted(e: str, o: str) -> bool:
    if not o:
        return bool(e)
    to, te = _tokens(o), _tokens(e)
    return bool(to) and len(to) < len(te) and _is_subsequence(to, te)


def _cropped(e: str, o: str) -> bool:
    return bool(o) and len(o) < len(e) and e.startswith(o) and o[-1].isalnum() and e[len(o)].isalnum()


def _padded(e: str, o: str) -> bool:
    return bool(e) and len(o) > len(e) and o.startswith(e) and e[-1].isalnum() and o[len(e)].isalnum()


def _jumbled(e: str, o: str) -> bool:
    return len(e) == len(o) and e != o and sorted(e) == sorted(o)


def _is_ascii_digits(s: str) -> bool:
    return bool(s) and all("0" <= c <= "9" for c in s)


def _plus_minus(e: str, o: str) -> bool:
    if not (_is_ascii_digits(e) and _is_ascii_digits(o)):
        return False
    if abs(int(e) - int(o)) in (1, 2):
        return True
    if len(e) != len(o):
        return False
    diffs = [(a, b) for a, b in zip(e, o) if a != b]
    return len(diffs) == 1 and abs(int(diffs[0][0]) - int(diffs[0][1])) in (1, 2)


def _abbreviated(e: str, o: str) -> bool:
    to, te = _tokens(o), _tokens(e)
    if not to or len(o) >= len(e):
        return False
    truncated = False
    it = iter(te)
    for tok in to:
        for cand in it:
            if cand.startswith(tok):
                truncated = truncated or len(tok) < len(cand)
                break
        else:
            return False
    return truncated


def _full_first_name(e: str, o: str) -> bool:
    return len(e) == 1 and e.isalpha() and len(o) >= 2 and o.isalpha() and o.startswith(e)


def _space_only(e: str, o: str) -> bool:
    return e.replace(" ", "") == o.replace(" ", "")


def _diacritic_keys(s: str) -> set[str]:
    return {fold_diacritics(s), fold_diacritics(expand_umlauts(s))}


def _special_char(e: str, o: str) -> bool:
    return not _diacritic_keys(e).isdisjoint(_diacritic_keys(o))


def _strip_punct(s: str, repl: str) -> str:
    return _WS.sub(" ", "".join(c if c.isalnum() or c.isspace() else repl for c in s)).strip()


def _punctuation(e: str, o: str) -> bool:
    return _strip_punct(e, "") == _strip_punct(o, "") or _strip_punct(e, " ") == _strip_punct(o, " ")


def _additional(e: str, o: str) -> bool:
    te, to = _tokens(e), _tokens(o)
    n = len(te)
    if not te or len(to) <= n:
        return False
    return any(to[i : i + n] == te for i in range(len(to) - n + 1))


def longest_common_substring(a: str, b: str) -> int:
    best = 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, 1):
            v = prev[j - 1] + 1 if ca == cb else 0
            cur.append(v)
            if v > best:
                best = v
        prev = cur
    return best


def partial_overlap_floor(e: str, o: str) -> int:
    """Shared-substring length from which a value counts as partially correct."""
    return max(3, math.ceil(min(len(e), len(o)) / 2))


def _partially_incorrect(e: str, o: str) -> bool:
    if levenshtein(e, o) <= 2:
        return False
    return longest_common_substring(e, o) >= partial_overlap_floor(e, o)


_LOCAL_PREDICATES = {
    "E": _omitted,
    "F": _cropped,
    "S": _padded,
    "H": _jumbled,
    "T": _plus_minus,
    "I": _abbreviated,
    "U": _full_first_name,
    "K": _space_only,
    "Q": _special_char,
    "R": _punctuation,
    "N": _additional,
    "J": _partially_incorrect,
}

_G_GROUPS = (
    frozenset({VOLUME, START_PAGE, END_PAGE, ISSUE}),
    frozenset({AUTHOR_LAST, FIRST_INITIAL, SECOND_INITIAL}),
)


def _interchanged(o: str, fld: str, ctx: FieldContext) -> bool:
    group = next((g for g in _G_GROUPS if fld in g), frozenset())
    return bool(o) and any(
        f != fld and _canon(ctx.expected.get(f, "")) == o for f in sorted(group)
    )


def _surname_parts(name: str) -> list[str]:
    return [p for p in re.split(r"[-\s]+", name) if p]


def _misread_author(e: str, o: str, fld: str, ctx: FieldContext) -> bool:
    expected_last = _canon(ctx.expected.get(AUTHOR_LAST, ""))
    parts = _surname_parts(expected_last)
    if len(parts) < 2:
        return False
    if fld == AUTHOR_LAST:
        observed_last = o
        initials = _canon(ctx.observed.get(FIRST_INITIAL, "") + ctx.observed.get(SECOND_INITIAL, ""))
    else:
        observed_last = _canon(ctx.observed.get(AUTHOR_LAST, ""))
        initials = o
    if observed_last not in parts:
        return False
    dropped = [p for p in parts if p != observed_last]
    if fld == AUTHOR_LAST:
        return any(p[0] in initials for p in dropped)
    return any(p[0] == o for p in dropped)


def _author_order(o: str, fld: str, ctx: FieldContext) -> bool:
    observed_last = o if fld == AUTHOR_LAST else _canon(ctx.observed.get(AUTHOR_LAST, ""))
    if not observed_last:
        return False
    for co in ctx.coauthors:
        if _canon(co.last) != observed_last:
            continue
        if fld == AUTHOR_LAST:
            return True
        # an initial the co-author lacks shows up as an empty field
        letters = [c for c in _canon(co.initials) if c.isalpha()]
        pos = 0 if fld == FIRST_INITIAL else 1
        if (letters[pos] if pos < len(letters) else "") == o:
            return True
    return False


def classify_field(
    expected: str,
    observed: str,
    field: str,
    context: FieldContext | None = None,
) -> frozenset[str]:
    """Inaccuracy codes explaining why ``observed`` differs from ``expected``.

    Returns an empty set when the two values agree (case-insensitively).
    """
    e, o = _canon(expected), _canon(observed)
    if e == o:
        return frozenset()
    codes: set[str] = set()

    def in_scope(code: str) -> bool:
        return field in IAC_TABLE[code].field_scope

    if context is not None:
        if in_scope("G") and _interchanged(o, field, context):
            codes.add(G_SUBTYPE_BY_FIELD[field])
        if in_scope("M") and _misread_author(e, o, field, context):
            codes.add("M")
        if in_scope("O") and _author_order(o, field, context):
            codes.add("O")
    for code in FIELD_LOCAL_ORDER:
        if in_scope(code) and _LOCAL_PREDICATES[code](e, o):
            codes.add(code)
            break
    if not codes:
        codes.add("B" if in_scope("B") and levenshtein(e, o) <= 2 else "D")
    return frozenset(codes)


# --- annotation of missed matches ---------------------------------------------


@dataclass(frozen=True)
class IacAnnotation:
    ref_id: str
    field: str
    codes: tuple[str, ...]
    observed: str
    expected: str


@dataclass
class AnnotationResult:
    annotations: list[IacAnnotation] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.annotations)

    def __len__(self) -> int:
        return len(self.annotations)


def _closest_name(target: TargetArticle, observed: str) -> str:
    """The target name form the observed value was most likely derived from."""
    o = _canon(observed)
    forms = [target.primary_pub_name, *target.pub_names]
    return min(forms, key=lambda f: (-longest_common_substring(_canon(f), o), levenshtein(_canon(f), o)))


def annotate_reference(ref: CitedReference, target: TargetArticle) -> list[IacAnnotation]:
    """One annotation per assessed field on which ``ref`` departs from ``target``."""
    ctx = context_for(target, ref)
    out = []
    for fld in ASSESSED_FIELDS:
        observed = ctx.observed[fld]
        expected = ctx.expected[fld]
        if fld == ISSUE and not observed:
            continue  # issue numbers are only sometimes delivered
        if fld == PUB_NAME:
            if _canon(observed) in {_canon(n) for n in target.pub_names}:
                continue
            expected = _closest_name(target, observed)
        codes = classify_field(expected, observed, fld, ctx)
        if codes:
            out.append(IacAnnotation(ref.ref_id, fld, tuple(sorted(codes)), observed, expected))
    return out


def annotate_missed(
    matches: Iterable[MatchRecord],
    refs: Iterable[CitedReference],
    targets: Iterable[TargetArticle],
    links: Iterable[GroundTruthLink],
) -> AnnotationResult:
    """Annotate every reference whose true target was not linked.

    References without a known in-corpus target are listed in ``skipped``.
    """
    ref_map = {r.ref_id: r for r in refs}
    target_map = {t.id: t for t in targets}
    link_map = {lk.ref_id: lk for lk in links}
    result = AnnotationResult()
    for m in matches:
        lk = link_map.get(m.ref_id)
        true_id = lk.true_target_id if lk is not None else None
        if true_id is None or true_id not in target_map:
            if m.ref_id not in {a for a in result.skipped}:
                result.skipped.append(m.ref_id)
            continue
        if true_id in m.linked_targets:
            continue
        result.annotations.extend(annotate_reference(ref_map[m.ref_id], target_map[true_id]))
    return result


def single_vs_multi_inaccuracy_stats(
    annotations: Iterable[IacAnnotation],
) -> tuple[float | None, float | None]:
    """Share of annotated references with exactly one (field, code) pair vs. more."""
    pairs: dict[str, set[tuple[str, str]]] = defaultdict(set)
    for a in annotations:
        for c in a.codes:
            pairs[a.ref_id].add((a.field, c))
    if not pairs:
        return None, None
    single = sum(1 for p in pairs.values() if len(p) == 1)
    return single / len(pairs), (len(pairs) - single) / len(pairs)
