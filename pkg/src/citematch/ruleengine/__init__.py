"""Decreasing-strictness rule cascades for linking references to targets."""

from .config import BUILTIN, UnknownProfileError, builtin_profile, load_profile, resolve_profile
from .index import Features, TargetIndex, build_index, reference_features, target_features
from .matcher import match_corpus, match_reference, predicate_holds, rule_holds
from .rules import (
    AmbiguityPolicy,
    CascadeProfile,
    ConfigError,
    Field,
    FieldPredicate,
    MatchRule,
    PubNameSources,
    Test,
    parse_predicate,
)

__all__ = [
    "BUILTIN",
    "AmbiguityPolicy",
    "CascadeProfile",
    "ConfigError",
    "Features",
    "Field",
    "FieldPredicate",
    "MatchRule",
    "PubNameSources",
    "TargetIndex",
    "Test",
    "UnknownProfileError",
    "build_index",
    "builtin_profile",
    "load_profile",
    "match_corpus",
    "match_reference",
    "parse_predicate",
    "predicate_holds",
    "reference_features",
    "resolve_profile",
    "rule_holds",
    "target_features",
]
