"""Clean synthetic corpora and the injection plan."""

from __future__ import annotations

import json
import math
import random
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping

from citematch.model import (
    Author,
    CitedReference,
    Corpus,
    Domain,
    GroundTruthLink,
    SourceArticle,
    TargetArticle,
)
from citematch.taxonomy import IAC_TABLE

from .vocab import INITIAL_LETTERS, JOURNALS, SURNAMES, TITLE_WORDS

MEAN_REFS_PER_TARGET = 13
YEAR_RANGE = (1985, 2012)
ISSUE_SHARE = 0.8
DOI_SHARE = 0.7
REF_ISSUE_SHARE = 0.3
REF_DOI_SHARE = 0.5
SAME_DOMAIN_SOURCE_SHARE = 0.9


def _valid_code(code: str) -> bool:
    return code in IAC_TABLE or (code[:1] == "G" and code[1:].isdigit())


@dataclass(frozen=True)
class InjectionPlan:
    """Knobs for corrupting a clean corpus.

    ``per_code_rates`` are independent per-reference draw probabilities.
    ``field_overrides`` pins a code to one field (e.g. ``{"T": "start_page"}``);
    otherwise each draw picks among the fields the code can be applied to.
    """

    seed: int = 0
    per_code_rates: Mapping[str, float] = field(default_factory=dict)
    multi_inaccuracy_rate: float = 0.0
    phantom_rate: float = 0.0
    duplicate_target_rate: float = 0.0
    corpus_size: tuple[int, int] = (300, 3968)
    field_overrides: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        probs = {
            "multi_inaccuracy_rate": self.multi_inaccuracy_rate,
            "phantom_rate": self.phantom_rate,
            "duplicate_target_rate": self.duplicate_target_rate,
            **{f"rate[{c}]": r for c, r in self.per_code_rates.items()},
        }
        for name, p in probs.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        for code in (*self.per_code_rates, *self.field_overrides):
            if not _valid_code(code):
                raise ValueError(f"unknown inaccuracy code {code!r}")
        n_targets, n_refs = self.corpus_size
        if n_targets < 0 or n_refs < 0:
            raise ValueError("corpus sizes must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["per_code_rates"] = dict(sorted(self.per_code_rates.items()))
        d["field_overrides"] = dict(sorted(self.field_overrides.items()))
        d["corpus_size"] = list(self.corpus_size)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> InjectionPlan:
        known = {f for f in cls.__dataclass_fields__}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown plan keys {sorted(bad)}")
        kw = dict(d)
        if "corpus_size" in kw:
            kw["corpus_size"] = tuple(int(x) for x in kw["corpus_size"])
        if "per_code_rates" in kw:
            kw["per_code_rates"] = {str(k): float(v) for k, v in kw["per_code_rates"].items()}
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> InjectionPlan:
        return cls.from_dict(json.loads(text))


def _geometric(rng: random.Random, mean: float) -> int:
    """Geometric count on {1, 2, ...} with the given mean."""
    p = 1.0 / mean
    if p >= 1.0:
        return 1
    u = rng.random()
    return 1 + int(math.log(1.0 - u) / math.log(1.0 - p))


def _initials(rng: random.Random) -> str:
    first = rng.choice(INITIAL_LETTERS)
    if rng.random() < 0.6:
        return first + rng.choice(INITIAL_LETTERS)
    return first


def _make_targets(n: int, rng: random.Random) -> list[TargetArticle]:
    cursor: dict[tuple[int, int], int] = defaultdict(int)
    targets = []
    for i in range(n):
        j = rng.randrange(len(JOURNALS))
        journal = JOURNALS[j]
        year = rng.randint(max(YEAR_RANGE[0], journal.first_year), YEAR_RANGE[1])
        volume = year - journal.first_year + 1
        start = cursor[(j, volume)] + rng.randint(1, 6)
        end = start + rng.randint(3, 24)
        cursor[(j, volume)] = end
        n_authors = rng.choice((1, 2, 2, 3, 3, 4))
        names = rng.sample(SURNAMES, n_authors)
        authors = tuple(Author(name, _initials(rng)) for name in names)
        first = authors[0]
        issue = str(rng.randint(1, 12)) if rng.random() < ISSUE_SHARE else ""
        doi = f"10.{1000 + j}/{journal.abbrevs[0].split()[0].lower()}.{year}.{start}" if rng.random() < DOI_SHARE else ""
        title = " ".join(rng.sample(TITLE_WORDS, 4)).capitalize()
        targets.append(
            TargetArticle(
                id=f"T{i + 1:05d}",
                first_author_last=first.last,
                first_initial=first.initials[0],
                second_initial=first.initials[1:2],
                all_authors=authors,
                pub_year=year,
                pub_name_full=journal.full,
                pub_name_abbrevs=journal.abbrevs,
                volume=str(volume),
                issue=issue,
                start_page=str(start),
                end_page=str(end),
                doi=doi,
                article_title=title,
                domain_tag=journal.domain,
                accumulated_citations=_geometric(rng, 20) - 1,
            )
        )
    return targets


def reference_for(
    t: TargetArticle, ref_id: str, source_id: str, *, with_issue: bool, with_doi: bool
) -> CitedReference:
    """A reference carrying exactly the target's citation-format fields."""
    return CitedReference(
        ref_id=ref_id,
        source_article_id=source_id,
        first_author_last=t.first_author_last,
        first_initial=t.first_initial,
        second_initial=t.second_initial,
        pub_year=t.pub_year,
        pub_name=t.primary_pub_name,
        volume=t.volume,
        issue=t.issue if with_issue else "",
        start_page=t.start_page,
        doi=t.doi if with_doi else "",
    )


def generate_clean(
    n_targets: int,
    n_refs: int,
    seed: int,
    *,
    mean_refs_per_target: float = MEAN_REFS_PER_TARGET,
) -> Corpus:
    """Targets plus references that are field-identical to their targets.

    Target popularity follows a geometric law with the given mean; each
    reference draws its target in proportion to popularity. References come
    from source articles that mostly share their target's domain.
    """
    if n_refs and not n_targets:
        raise ValueError("references need at least one target")
    rng = random.Random(f"{seed}:clean")
    targets = _make_targets(n_targets, rng)
    weights = [_geometric(rng, mean_refs_per_target) for _ in targets]

    n_sources = max(1, math.ceil(n_refs / 40)) if n_refs else 0
    sources = [
        SourceArticle(f"S{k + 1:05d}", rng.choice((Domain.NATURAL_SCIENCES, Domain.SOCIAL_SCIENCES_HUMANITIES)))
        for k in range(n_sources)
    ]
    by_domain: dict[Domain, list[SourceArticle]] = defaultdict(list)
    for s in sources:
        by_domain[s.domain_tag].append(s)

    refs, links = [], []
    chosen = rng.choices(range(len(targets)), weights=weights, k=n_refs) if n_refs else []
    for k, ti in enumerate(chosen):
        t = targets[ti]
        pool = by_domain.get(t.domain_tag) if rng.random() < SAME_DOMAIN_SOURCE_SHARE else None
        source = rng.choice(pool or sources)
        ref_id = f"R{k + 1:06d}"
        refs.append(
            reference_for(
                t,
                ref_id,
                source.id,
                with_issue=rng.random() < REF_ISSUE_SHARE,
                with_doi=rng.random() < REF_DOI_SHARE,
            )
        )
        links.append(GroundTruthLink(ref_id, t.id))
    return Corpus(targets=targets, refs=refs, links=links, sources=sources)
