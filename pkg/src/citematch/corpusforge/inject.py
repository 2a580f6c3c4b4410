"""Typed corruption of references, phantom links and duplicate targets.

Each inaccuracy code has a transform that produces a value the classifier's
predicate for that code accepts while the predicates earlier in the priority
order reject it. D is defined negatively ("none of the above"), so its
transform samples replacement values and keeps the first one that bears no
structural relation to the original.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from citematch.model import (
    YEAR_MAX,
    YEAR_MIN,
    CitedReference,
    Corpus,
    GroundTruthLink,
    SourceArticle,
    TargetArticle,
)
from citematch.strmetrics import levenshtein
from citematch.taxonomy import (
    AUTHOR_LAST,
    FIRST_INITIAL,
    G_SUBTYPE_BY_FIELD,
    ISSUE,
    PUB_NAME,
    PUB_YEAR,
    SECOND_INITIAL,
    START_PAGE,
    VOLUME,
    classify_field,
    context_for,
    observed_fields,
)
from citematch.textnorm import fold_diacritics

from .generator import InjectionPlan, reference_for
from .vocab import ADDITIONAL_INFO, FIRST_NAMES, JOURNALS, PADDING_LETTERS, PREFIX_CHUNKS, SURNAMES


@dataclass(frozen=True)
class InjectionEntry:
    ref_id: str
    field: str
    code: str
    original: str
    corrupted: str


@dataclass(frozen=True)
class SkippedDraw:
    ref_id: str
    code: str
    field: str
    reason: str


@dataclass
class InjectionLog:
    entries: list[InjectionEntry] = field(default_factory=list)
    skipped: list[SkippedDraw] = field(default_factory=list)

    def codes_by_ref(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for e in self.entries:
            out.setdefault(e.ref_id, set()).add(e.code)
        return out

    def field_code_pairs(self) -> dict[str, set[tuple[str, str]]]:
        out: dict[str, set[tuple[str, str]]] = {}
        for e in self.entries:
            out.setdefault(e.ref_id, set()).add((e.field, e.code))
        return out


# A transform sees the reference's current field values and returns the
# changed fields, or None when the code cannot be applied to ``fld``.
Transform = Callable[[dict[str, str], TargetArticle, str, random.Random], "dict[str, str] | None"]

_DIGITS = "0123456789"
_ASCII_LOWER = "abcdefghijklmnopqrstuvwxyz"


def _is_number(v: str) -> bool:
    return bool(v) and all(c in _DIGITS for c in v)


def _with_case(template: str, c: str) -> str:
    return c.upper() if template.isupper() else c.lower()


def _spelling(vals, t, fld, rng):
    v = vals[fld]
    positions = [i for i in range(1, len(v)) if v[i].isascii() and v[i].isalpha()]
    if len(v) < 3 or not positions:
        return None
    for _ in range(20):
        chars = list(v)
        for i in rng.sample(positions, min(len(positions), rng.choice((1, 2)))):
            repl = rng.choice([c for c in _ASCII_LOWER if c != v[i].lower()])
            chars[i] = _with_case(v[i], repl)
        out = "".join(chars)
        if sorted(out.casefold()) != sorted(v.casefold()):
            return {fld: out}
    return None


def _unrelated_pool(fld: str, v: str, rng: random.Random) -> list[str]:
    if fld == AUTHOR_LAST:
        pool = list(SURNAMES)
    elif fld == PUB_NAME:
        pool = [j.abbrevs[0] for j in JOURNALS]
    else:
        width = max(3, len(v))
        pool = [str(rng.randint(10 ** (width - 1), 10**width - 1)) for _ in range(40)]
    rng.shuffle(pool)
    return pool


def _incorrect(vals, t, fld, rng):
    v = vals[fld]
    if not v:
        return None
    for cand in _unrelated_pool(fld, v, rng):
        trial = dict(vals, **{fld: cand})
        ctx = context_for(t, _apply(_ref_stub(t), trial))
        if levenshtein(cand.casefold(), v.casefold()) > 2 and classify_field(v, cand, fld, ctx) == {"D"}:
            return {fld: cand}
    return None


def _omission(vals, t, fld, rng):
    v = vals[fld]
    if fld == SECOND_INITIAL:
        return {fld: ""} if v else None
    if fld == AUTHOR_LAST:
        parts = [p for p in re.split(r"[-\s]+", v) if p]
    else:
        parts = v.split()
    if len(parts) < 2:
        return None
    drop = rng.randrange(len(parts))
    return {fld: " ".join(p for i, p in enumerate(parts) if i != drop)}


def _crop(vals, t, fld, rng):
    v = vals[fld]
    cuts = [k for k in range(1, len(v)) if v[k - 1].isalnum() and v[k].isalnum()]
    if not _is_number(v):
        cuts = [k for k in cuts if k >= 2]
    if not cuts:
        return None
    return {fld: v[: rng.choice(cuts)]}


def _pad(vals, t, fld, rng):
    v = vals[fld]
    if not v or not v[-1].isalnum():
        return None
    pool = _DIGITS if _is_number(v) else PADDING_LETTERS
    extra = "".join(rng.choice(pool) for _ in range(rng.choice((1, 2))))
    return {fld: v + (extra if v.isupper() or _is_number(v) else extra.lower())}


def _jumble(vals, t, fld, rng):
    v = vals[fld]
    if _is_number(v):
        if len(set(v)) < 2:
            return None
        for _ in range(20):
            chars = list(v)
            rng.shuffle(chars)
            out = "".join(chars)
            if out != v and out[0] != "0":
                return {fld: out}
        return None
    swaps = [i for i in range(1, len(v) - 1) if v[i].isalpha() and v[i + 1].isalpha() and v[i].lower() != v[i + 1].lower()]
    if not swaps:
        return None
    i = rng.choice(swaps)
    return {fld: v[:i] + v[i + 1] + v[i] + v[i + 2 :]}


def _plus_minus(vals, t, fld, rng):
    v = vals[fld]
    if not _is_number(v):
        return None
    options = []
    for d in (-2, -1, 1, 2):
        n = int(v) + d
        if n > 0:
            options.append(str(n))
    for i, c in enumerate(v):
        for d in (-2, -1, 1, 2):
            nd = int(c) + d
            if 0 <= nd <= 9 and not (i == 0 and nd == 0):
                options.append(v[:i] + str(nd) + v[i + 1 :])
    options = sorted({o for o in options if o != v})
    if fld == PUB_YEAR:
        options = [o for o in options if YEAR_MIN <= int(o) <= YEAR_MAX]
    return {fld: rng.choice(options)} if options else None


def _abbreviate(vals, t, fld, rng):
    tokens = vals[fld].split()
    candidates = [i for i, tok in enumerate(tokens[:-1]) if tok.isalpha() and len(tok) >= 2]
    if not candidates:
        return None
    i = rng.choice(candidates)
    tokens[i] = tokens[i][: rng.randint(1, len(tokens[i]) - 1)]
    return {fld: " ".join(tokens)}


def _full_first_name(vals, t, fld, rng):
    v = vals[fld]
    if len(v) != 1 or v.upper() not in FIRST_NAMES:
        return None
    return {fld: rng.choice(FIRST_NAMES[v.upper()])}


def _spacing(vals, t, fld, rng):
    v = vals[fld]
    spaces = [i for i, c in enumerate(v) if c == " "]
    if spaces:
        i = rng.choice(spaces)
        return {fld: v[:i] + v[i + 1 :]}
    slots = [i for i in range(2, len(v) - 1) if v[i - 1].isalpha() and v[i].isalpha()]
    if not slots:
        return None
    i = rng.choice(slots)
    return {fld: v[:i] + " " + v[i:]}


_UMLAUT_EXPANSION = {"ä": "ae", "ö": "oe", "ü": "ue", "Ä": "AE", "Ö": "OE", "Ü": "UE"}
_DECORATE = {"a": "ä", "o": "ö", "u": "ü", "e": "é", "A": "Ä", "O": "Ö", "U": "Ü", "E": "É"}


def _special_char(vals, t, fld, rng):
    v = vals[fld]
    decorated = [i for i, c in enumerate(v) if c != "ß" and fold_diacritics(c) != c]
    if decorated:
        i = rng.choice(decorated)
        c = v[i]
        if c in _UMLAUT_EXPANSION and rng.random() < 0.5:
            return {fld: v[:i] + _UMLAUT_EXPANSION[c] + v[i + 1 :]}
        return {fld: v[:i] + fold_diacritics(c) + v[i + 1 :]}
    plain = [i for i, c in enumerate(v) if c in _DECORATE]
    if not plain:
        return None
    i = rng.choice(plain)
    return {fld: v[:i] + _DECORATE[v[i]] + v[i + 1 :]}


def _punctuation(vals, t, fld, rng):
    v = vals[fld]
    if not v:
        return None
    if fld == AUTHOR_LAST and "-" in v:
        return {fld: v.replace("-", " ", 1)}
    if fld == PUB_NAME and " " in v and rng.random() < 0.5:
        return {fld: ". ".join(v.split()) + "."}
    return {fld: v + "."}


def _additional(vals, t, fld, rng):
    v = vals[fld]
    if not v:
        return None
    return {fld: f"{rng.choice(ADDITIONAL_INFO)} {v}"}


def _partial(vals, t, fld, rng):
    v = vals[fld]
    if len(v) < 3:
        return None
    chunk = rng.choice(PREFIX_CHUNKS)
    return {fld: (chunk.upper() if v.isupper() else chunk) + v}


def _interchange(vals, t, fld, rng):
    v = vals[fld]
    partners = [f for f in (ISSUE, START_PAGE) if f != fld and vals.get(f) and vals[f] != v]
    if not v or not partners:
        return None
    other = partners[0] if len(partners) == 1 or rng.random() < 0.5 else partners[1]
    return {fld: vals[other], other: v}


def _misread_compound(vals, t, fld, rng):
    parts = [p for p in re.split(r"[-\s]+", vals[AUTHOR_LAST]) if p]
    if len(parts) < 2 or not vals[FIRST_INITIAL]:
        return None
    out = {AUTHOR_LAST: parts[-1]}
    letter = parts[0][0].upper()
    if vals[SECOND_INITIAL].upper() != letter:
        out[SECOND_INITIAL] = letter
    return out


def _author_order(vals, t, fld, rng):
    if len(t.all_authors) < 2:
        return None
    co = t.all_authors[1]
    letters = [c for c in co.initials if c.isalpha()]
    out = {AUTHOR_LAST: co.last}
    first = letters[0] if letters else ""
    second = letters[1] if len(letters) > 1 else ""
    if first != vals[FIRST_INITIAL]:
        out[FIRST_INITIAL] = first
    if second != vals[SECOND_INITIAL]:
        out[SECOND_INITIAL] = second
    return out


TRANSFORMS: dict[str, Transform] = {
    "B": _spelling,
    "D": _incorrect,
    "E": _omission,
    "F": _crop,
    "G": _interchange,
    "H": _jumble,
    "I": _abbreviate,
    "J": _partial,
    "K": _spacing,
    "M": _misread_compound,
    "N": _additional,
    "O": _author_order,
    "Q": _special_char,
    "R": _punctuation,
    "S": _pad,
    "T": _plus_minus,
    "U": _full_first_name,
}

CODE_FIELDS: dict[str, tuple[str, ...]] = {
    "B": (AUTHOR_LAST, PUB_NAME),
    "D": (AUTHOR_LAST, PUB_NAME, VOLUME, START_PAGE),
    "E": (SECOND_INITIAL, PUB_NAME, AUTHOR_LAST),
    "F": (START_PAGE, VOLUME, PUB_NAME, AUTHOR_LAST),
    "G": (VOLUME,),
    "H": (START_PAGE, VOLUME, AUTHOR_LAST),
    "I": (PUB_NAME,),
    "J": (AUTHOR_LAST, PUB_NAME),
    "K": (AUTHOR_LAST, PUB_NAME),
    "M": (AUTHOR_LAST,),
    "N": (PUB_NAME,),
    "O": (AUTHOR_LAST,),
    "Q": (AUTHOR_LAST, PUB_NAME),
    "R": (AUTHOR_LAST, FIRST_INITIAL, PUB_NAME),
    "S": (VOLUME, START_PAGE, PUB_NAME),
    "T": (START_PAGE, VOLUME, PUB_YEAR),
    "U": (FIRST_INITIAL,),
}

INJECTABLE_CODES = tuple(sorted(TRANSFORMS))
FIELD_LOCAL_CODES = ("B", "D", "E", "F", "H", "K", "N", "Q", "R", "S", "T", "U")
STRUCTURED_CODES = ("G", "I", "J", "M", "O")


def _ref_stub(t: TargetArticle) -> CitedReference:
    return reference_for(t, "", "", with_issue=True, with_doi=False)


def _apply(ref: CitedReference, vals: dict[str, str]) -> CitedReference:
    year = vals[PUB_YEAR]
    return replace(
        ref,
        first_author_last=vals[AUTHOR_LAST],
        first_initial=vals[FIRST_INITIAL],
        second_initial=vals[SECOND_INITIAL],
        pub_year=int(year) if year else None,
        pub_name=vals[PUB_NAME],
        volume=vals[VOLUME],
        issue=vals[ISSUE],
        start_page=vals[START_PAGE],
    )


def _entry_code(code: str, fld: str) -> str:
    return G_SUBTYPE_BY_FIELD[fld] if code == "G" else code


def _draw_codes(plan: InjectionPlan, rng: random.Random) -> list[str]:
    rates = {c: r for c, r in sorted(plan.per_code_rates.items()) if r > 0}
    drawn = [c for c, r in rates.items() if rng.random() < r]
    if not drawn:
        return drawn
    want_multi = rng.random() < plan.multi_inaccuracy_rate
    if want_multi and len(drawn) == 1:
        others = [c for c in rates if c not in drawn]
        if others:
            drawn.append(rng.choices(others, weights=[rates[c] for c in others])[0])
    elif not want_multi and len(drawn) > 1:
        drawn = [rng.choice(drawn)]
    return drawn


def corrupt_reference(
    ref: CitedReference,
    target: TargetArticle,
    codes: Sequence[str],
    rng: random.Random,
    field_overrides: dict[str, str] | None = None,
) -> tuple[CitedReference, list[InjectionEntry], list[SkippedDraw]]:
    """Apply ``codes`` in order; each touches fields no earlier code touched."""
    overrides = field_overrides or {}
    vals = observed_fields(ref)
    taken: set[str] = set()
    entries: list[InjectionEntry] = []
    skipped: list[SkippedDraw] = []
    for code in codes:
        if code in overrides:
            fields = [overrides[code]]
        else:
            fields = list(CODE_FIELDS[code])
            rng.shuffle(fields)
        change = None
        reason = "inapplicable"
        for fld in fields:
            if not vals.get(fld):
                reason = "empty_field"
                continue
            if fld in taken:
                reason = "field_taken"
                continue
            change = TRANSFORMS[code](vals, target, fld, rng)
            if change is not None and taken.isdisjoint(change):
                break
            change = None
            reason = "inapplicable"
        if change is None:
            skipped.append(SkippedDraw(ref.ref_id, code, fields[0] if len(fields) == 1 else "*", reason))
            continue
        for fld, new in sorted(change.items()):
            entries.append(InjectionEntry(ref.ref_id, fld, _entry_code(code, fld), vals[fld], new))
        vals.update(change)
        taken.update(change)
    return _apply(ref, vals), entries, skipped


def inject(corpus: Corpus, plan: InjectionPlan) -> tuple[list[CitedReference], InjectionLog]:
    """Corrupt references per ``plan``; phantom references are left alone."""
    rng = random.Random(f"{plan.seed}:inject")
    targets = corpus.target_map()
    links = corpus.link_map()
    log = InjectionLog()
    out = []
    overrides = dict(plan.field_overrides)
    for ref in corpus.refs:
        codes = _draw_codes(plan, rng)
        link = links.get(ref.ref_id)
        if not codes or link is None or not link.truly_cites or link.true_target_id not in targets:
            out.append(ref)
            continue
        new_ref, entries, skipped = corrupt_reference(ref, targets[link.true_target_id], codes, rng, overrides)
        out.append(new_ref)
        log.entries.extend(entries)
        log.skipped.extend(skipped)
    return out, log


# --- phantoms ------------------------------------------------------------------


@dataclass(frozen=True)
class PhantomEntry:
    ref_id: str
    phantom_target_id: str
    displaced_target_id: str
    cited_work: str
    collision: str
    cross_domain: bool


_NAME_SUFFIXES = ("and", "ing", "er", "mann", "ow")


def _cited_work(w: TargetArticle, rng: random.Random, collision: str, journals: Sequence[str]) -> str:
    """The out-of-corpus work the source really cited, colliding with ``w``."""
    stem = w.first_author_last[:4]
    name = next(stem + s for s in _NAME_SUFFIXES if stem + s != w.first_author_last)
    initial = rng.choice("ABCDEFGHJKLMNPRSTW")
    journal = rng.choice([j for j in journals if j not in w.pub_names] or list(journals))
    if collision == "volume_year":
        page = str(int(w.start_page) + rng.randint(50, 400)) if w.start_page.isdigit() else "1"
        return f"{name.upper()} {initial}, {w.pub_year}, {journal}, V{w.volume}, P{page}"
    year = w.pub_year + rng.choice((-3, -2, 2, 3))
    return f"{name.upper()} {initial}, {year}, {journal}, V{w.volume}, P{w.start_page}"


def inject_phantoms(
    corpus: Corpus, plan: InjectionPlan
) -> tuple[list[CitedReference], list[GroundTruthLink], list[PhantomEntry]]:
    """Overwrite ``round(phantom_rate * n_refs)`` references with a wrong target.

    The source of such a reference really cited a work outside the corpus
    whose first-author prefix and volume (plus year or page) collide with the
    wrong target; extraction produced the wrong target's fields instead. The
    wrong target preferably comes from the other domain than the source.
    """
    n = round(plan.phantom_rate * len(corpus.refs))
    if n == 0 or len(corpus.targets) < 2:
        return list(corpus.refs), list(corpus.links), []
    rng = random.Random(f"{plan.seed}:phantoms")
    sources = {s.id: s for s in corpus.sources}
    links = corpus.link_map()
    targets = sorted(corpus.targets, key=lambda t: t.id)
    journals = sorted({j.abbrevs[0] for j in JOURNALS})
    chosen = sorted(rng.sample(range(len(corpus.refs)), min(n, len(corpus.refs))))
    refs = list(corpus.refs)
    new_links = {lk.ref_id: lk for lk in corpus.links}
    log = []
    for k in chosen:
        ref = refs[k]
        displaced = links[ref.ref_id].true_target_id if ref.ref_id in links else None
        src: SourceArticle | None = sources.get(ref.source_article_id)
        pool = [t for t in targets if t.id != displaced]
        if src is not None:
            other = [t for t in pool if t.domain_tag is not src.domain_tag]
            pool = other or pool
        w = rng.choice(pool)
        collision = rng.choice(("volume_year", "volume_page"))
        refs[k] = reference_for(w, ref.ref_id, ref.source_article_id, with_issue=False, with_doi=False)
        new_links[ref.ref_id] = GroundTruthLink(ref.ref_id, None, truly_cites=False, phantom_target_id=w.id)
        log.append(
            PhantomEntry(
                ref.ref_id,
                w.id,
                displaced or "",
                _cited_work(w, rng, collision, journals),
                collision,
                src is not None and src.domain_tag is not w.domain_tag,
            )
        )
    return refs, [new_links[lk.ref_id] for lk in corpus.links], log


# --- duplicates ----------------------------------------------------------------


@dataclass(frozen=True)
class DuplicateEntry:
    original_id: str
    duplicate_id: str


def duplicate_id(original_id: str) -> str:
    return f"{original_id}-DUP"


def inject_duplicates(
    targets: Sequence[TargetArticle],
    plan: InjectionPlan,
    *,
    exclude: Iterable[str] = (),
) -> tuple[list[TargetArticle], list[DuplicateEntry]]:
    """Add double records: same bibliographic fields under a fresh id.

    A double record usually collects fewer citations than the original, so
    its count is drawn from ``[0, original]``.
    """
    n = round(plan.duplicate_target_rate * len(targets))
    if n == 0:
        return list(targets), []
    rng = random.Random(f"{plan.seed}:duplicates")
    blocked = set(exclude)
    eligible = sorted((t for t in targets if t.id not in blocked), key=lambda t: t.id)
    picked = sorted(rng.sample(eligible, min(n, len(eligible))), key=lambda t: t.id)
    dupes = []
    log = []
    for t in picked:
        d = replace(t, id=duplicate_id(t.id), accumulated_citations=rng.randint(0, t.accumulated_citations))
        dupes.append(d)
        log.append(DuplicateEntry(t.id, d.id))
    return [*targets, *dupes], log


# --- full pipeline -------------------------------------------------------------


@dataclass
class ForgeResult:
    clean: Corpus
    corpus: Corpus
    injection_log: InjectionLog
    phantom_log: list[PhantomEntry]
    duplicate_log: list[DuplicateEntry]


def forge(corpus: Corpus, plan: InjectionPlan) -> ForgeResult:
    """Phantoms, then typed inaccuracies, then double records."""
    refs, links, phantoms = inject_phantoms(corpus, plan)
    staged = Corpus(list(corpus.targets), refs, links, list(corpus.sources))
    corrupted, log = inject(staged, plan)
    targets, dupes = inject_duplicates(
        corpus.targets, plan, exclude={p.phantom_target_id for p in phantoms}
    )
    out = Corpus(targets, corrupted, links, list(corpus.sources))
    return ForgeResult(corpus, out, log, phantoms, dupes)
