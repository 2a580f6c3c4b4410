"""Synthetic corpora with controlled, logged inaccuracies."""

from .generator import InjectionPlan, generate_clean, reference_for
from .inject import (
    CODE_FIELDS,
    FIELD_LOCAL_CODES,
    INJECTABLE_CODES,
    STRUCTURED_CODES,
    DuplicateEntry,
    ForgeResult,
    InjectionEntry,
    InjectionLog,
    PhantomEntry,
    SkippedDraw,
    corrupt_reference,
    duplicate_id,
    forge,
    inject,
    inject_duplicates,
    inject_phantoms,
)

__all__ = [
    "CODE_FIELDS",
    "FIELD_LOCAL_CODES",
    "INJECTABLE_CODES",
    "STRUCTURED_CODES",
    "DuplicateEntry",
    "ForgeResult",
    "InjectionEntry",
    "InjectionLog",
    "InjectionPlan",
    "PhantomEntry",
    "SkippedDraw",
    "corrupt_reference",
    "duplicate_id",
    "forge",
    "generate_clean",
    "inject",
    "inject_duplicates",
    "inject_phantoms",
    "reference_for",
]
