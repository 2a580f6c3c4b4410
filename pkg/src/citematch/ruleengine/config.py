"""Loading cascade profiles from TOML files.

Schema (``schema = "citematch-cascade/1"``)::

    name = "cwts"
    version = "1"
    ambiguity_policy = "most_cited"        # most_cited | keep_ambiguous | fail
    year_window = [-1, 0, 1]               # target_year - ref_year
    pub_name_sources = "full_and_abbrevs"  # full | abbrevs | abbrevs_or_full | full_and_abbrevs

    [norm]
    strip_diacritics = true
    ...

    [[rules]]
    label = "all fields exact"
    requires_doi = false
    author_last = "exact"
    pub_name = "fuzzy(lev, prop 0.2, min 1, max 5)"
    # fields left out are "omit"

Rules must appear in non-increasing strictness (see ``MatchRule.strictness``).
"""

from __future__ import annotations

import sys
from dataclasses import fields as dc_fields
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from citematch.textnorm import NormProfile

from .rules import AmbiguityPolicy, CascadeProfile, ConfigError, MatchRule, PubNameSources

SCHEMA = "citematch-cascade/1"
BUILTIN = ("strict", "cwts", "ifq")

_NORM_KEYS = {f.name for f in dc_fields(NormProfile)}
_RULE_META = {"label", "requires_doi"}


class UnknownProfileError(KeyError):
    """Raised for a profile name that is neither built in nor a file."""

    def __str__(self) -> str:
        return f"unknown profile {self.args[0]!r} (built-in: {', '.join(BUILTIN)})"


def profile_from_dict(data: dict[str, Any]) -> CascadeProfile:
    schema = data.get("schema")
    if schema != SCHEMA:
        raise ConfigError(f"unsupported cascade schema {schema!r} (expected {SCHEMA!r})")
    try:
        name = str(data["name"])
        norm_data = dict(data.get("norm", {}))
        bad = set(norm_data) - _NORM_KEYS
        if bad:
            raise ConfigError(f"unknown norm flags {sorted(bad)}")
        rules = []
        for i, block in enumerate(data["rules"]):
            block = dict(block)
            meta = {k: block.pop(k) for k in _RULE_META if k in block}
            rules.append(
                MatchRule.build(
                    i,
                    {k: str(v) for k, v in block.items()},
                    requires_doi=bool(meta.get("requires_doi", False)),
                    label=str(meta.get("label", "")),
                )
            )
        profile = CascadeProfile(
            name=name,
            norm=NormProfile(**norm_data),
            rules=tuple(rules),
            ambiguity_policy=AmbiguityPolicy(data["ambiguity_policy"]),
            year_window=frozenset(int(d) for d in data["year_window"]),
            pub_name_sources=PubNameSources(data.get("pub_name_sources", "full_and_abbrevs")),
            version=str(data.get("version", "")),
            description=str(data.get("description", "")),
        )
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    profile.check_ordering()
    return profile


def load_profile(path: str | Path) -> CascadeProfile:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return profile_from_dict(data)


def builtin_profile(name: str) -> CascadeProfile:
    if name not in BUILTIN:
        raise UnknownProfileError(name)
    text = resources.files("citematch.ruleengine").joinpath(f"profiles/{name}.toml").read_text("utf-8")
    return profile_from_dict(tomllib.loads(text))


def resolve_profile(name_or_path: str) -> CascadeProfile:
    """A built-in profile name, or a path to a cascade TOML file."""
    if name_or_path in BUILTIN:
        return builtin_profile(name_or_path)
    path = Path(name_or_path)
    if path.suffix == ".toml" and path.is_file():
        return load_profile(path)
    raise UnknownProfileError(name_or_path)
