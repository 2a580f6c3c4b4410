"""String and numeric similarity primitives used by the matching rules.

The edit-distance kernels come from the compiled ``_ckernels`` extension when
it is importable and from ``_pykernels`` otherwise. Set
``CITEMATCH_PURE_PYTHON=1`` to force the fallback, or call :func:`use_backend`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from types import ModuleType

from citematch.textnorm import fold_diacritics

from . import _pykernels

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernels = None


def _select(name: str | None = None) -> ModuleType:
    if name is None:
        name = "python" if os.environ.get("CITEMATCH_PURE_PYTHON") == "1" else "auto"
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not available")
        return _ckernels
    if name == "auto":
        return _ckernels if _ckernels is not None else _pykernels
    raise ValueError(f"unknown backend {name!r}")


_kernels = _select()


def use_backend(name: str) -> str:
    """Switch kernels at runtime ('cython', 'python' or 'auto'); returns the active name."""
    global _kernels
    _kernels = _select(name)
    return backend()


def backend() -> str:
    return "cython" if _kernels is _ckernels else "python"


def compiled_available() -> bool:
    return _ckernels is not None


def levenshtein(a: str, b: str) -> int:
    return _kernels.levenshtein(a, b)


def damerau_levenshtein(a: str, b: str) -> int:
    return _kernels.damerau_levenshtein(a, b)


class Metric(str, Enum):
    LEV = "lev"
    DAMERAU = "damerau"


class ThresholdKind(str, Enum):
    ABSOLUTE_EDITS = "absolute_edits"
    LENGTH_PROPORTIONAL = "length_proportional"


@dataclass(frozen=True)
class MetricThreshold:
    """Maximum tolerated edit distance.

    For ``length_proportional`` the budget is ``ceil(value * longer_length)``,
    clamped to ``[min_edits, max_edits]``.
    """

    kind: ThresholdKind
    value: float
    min_edits: int = 0
    max_edits: int | None = None

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("threshold value must be non-negative")
        if self.kind is ThresholdKind.LENGTH_PROPORTIONAL and self.value > 1:
            raise ValueError("length-proportional threshold must be <= 1")

    @classmethod
    def absolute(cls, edits: int) -> MetricThreshold:
        return cls(ThresholdKind.ABSOLUTE_EDITS, edits)

    @classmethod
    def proportional(cls, ratio: float, min_edits: int = 0, max_edits: int | None = None) -> MetricThreshold:
        return cls(ThresholdKind.LENGTH_PROPORTIONAL, ratio, min_edits, max_edits)

    def budget(self, a: str, b: str) -> int:
        if self.kind is ThresholdKind.ABSOLUTE_EDITS:
            return math.floor(self.value)
        # exact rational arithmetic: 0.2 * 15 must give 3, not 3.0000000000000004
        edits = math.ceil(Fraction(str(self.value)) * max(len(a), len(b)))
        edits = max(edits, self.min_edits)
        if self.max_edits is not None:
            edits = min(edits, self.max_edits)
        return edits


def within_threshold(a: str, b: str, metric: Metric | str, t: MetricThreshold) -> bool:
    limit = t.budget(a, b)
    if abs(len(a) - len(b)) > limit:
        return False
    if Metric(metric) is Metric.LEV:
        return levenshtein(a, b) <= limit
    return damerau_levenshtein(a, b) <= limit


def numeric_deviation_ok(a: str, b: str, max_delta: int) -> bool:
    da = "".join(c for c in a if c in "0123456789")
    db = "".join(c for c in b if c in "0123456789")
    if not da or not db:
        return False
    return abs(int(da) - int(db)) <= max_delta


class UnencodableNameError(ValueError):
    """Raised when a name has no ASCII letter left to encode."""


_SOUNDEX_CODES = {
    **dict.fromkeys("BFPV", "1"),
    **dict.fromkeys("CGJKQSXZ", "2"),
    **dict.fromkeys("DT", "3"),
    "L": "4",
    **dict.fromkeys("MN", "5"),
    "R": "6",
}


def soundex(name: str) -> str:
    """Classic American Soundex: one letter followed by three digits.

    H and W do not separate letters with equal codes (``ASHCRAFT`` is A261);
    vowels do.
    """
    letters = [c for c in fold_diacritics(name).upper() if "A" <= c <= "Z"]
    if not letters:
        raise UnencodableNameError(f"no encodable letters in {name!r}")
    first = letters[0]
    digits: list[str] = []
    prev = _SOUNDEX_CODES.get(first, "")
    for c in letters[1:]:
        code = _SOUNDEX_CODES.get(c, "")
        if code:
            if code != prev:
                digits.append(code)
                if len(digits) == 3:
                    break
            prev = code
        elif c not in "HW":
            prev = ""
    return first + "".join(digits).ljust(3, "0")


__all__ = [
    "Metric",
    "MetricThreshold",
    "ThresholdKind",
    "UnencodableNameError",
    "backend",
    "compiled_available",
    "damerau_levenshtein",
    "levenshtein",
    "numeric_deviation_ok",
    "soundex",
    "use_backend",
    "within_threshold",
]
