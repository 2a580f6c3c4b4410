"""Field preprocessing applied to references and targets before matching."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

# Letters NFKD does not decompose into a base letter plus marks.
_FOLD_EXCEPTIONS = str.maketrans(
    {
        "ß": "ss",
        "ẞ": "SS",
        "Æ": "AE",
        "æ": "ae",
        "Ø": "O",
        "ø": "o",
        "Œ": "OE",
        "œ": "oe",
        "Ł": "L",
        "ł": "l",
        "Đ": "D",
        "đ": "d",
        "Ð": "D",
        "ð": "d",
        "Þ": "TH",
        "þ": "th",
        "ı": "i",
        "Ħ": "H",
        "ħ": "h",
    }
)

_UMLAUT_EXPANSION = str.maketrans(
    {"Ä": "AE", "ä": "ae", "Ö": "OE", "ö": "oe", "Ü": "UE", "ü": "ue"}
)

_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class NormProfile:
    strip_diacritics: bool = False
    drop_non_alpha_from_text: bool = False
    drop_non_alnum_from_text: bool = False
    keep_first_initial_only: bool = False
    strip_non_numeric_from_numbers: bool = False
    uppercase: bool = True

    def __post_init__(self) -> None:
        if self.drop_non_alpha_from_text and self.drop_non_alnum_from_text:
            raise ValueError("drop_non_alpha_from_text and drop_non_alnum_from_text are exclusive")


def fold_diacritics(s: str) -> str:
    """Map decorated Latin letters to their base letters ("Köster" -> "Koster")."""
    s = unicodedata.normalize("NFKD", s.translate(_FOLD_EXCEPTIONS))
    return "".join(c for c in s if not unicodedata.combining(c))


def expand_umlauts(s: str) -> str:
    """German transcription of umlauts ("Altenmüller" -> "Altenmueller")."""
    return s.translate(_UMLAUT_EXPANSION)


def normalize_text(s: str, p: NormProfile) -> str:
    if p.strip_diacritics:
        s = fold_diacritics(s)
    if p.uppercase:
        s = s.upper()
        if p.strip_diacritics:
            # a few code points only decompose after case mapping
            s = fold_diacritics(s)
    if p.drop_non_alpha_from_text:
        return "".join(c for c in s if c.isalpha())
    if p.drop_non_alnum_from_text:
        return "".join(c for c in s if c.isalnum())
    return "".join(c for c in s if not c.isspace())


def text_variants(s: str, p: NormProfile) -> tuple[str, ...]:
    """Alternate matching keys for one text value.

    With diacritic stripping enabled the umlaut-expanded spelling is kept next
    to the plainly folded one, so "ALTENMUELLER" and "Altenmüller" share a key.
    """
    keys = {normalize_text(s, p)}
    if p.strip_diacritics:
        keys.add(normalize_text(expand_umlauts(s), p))
    return tuple(sorted(keys))


def normalize_number(s: str, p: NormProfile) -> str:
    if p.strip_non_numeric_from_numbers:
        return "".join(c for c in s if c in _DIGITS)
    s = "".join(c for c in s if not c.isspace())
    return s.upper() if p.uppercase else s


def reduce_initials(first: str, second: str, p: NormProfile) -> tuple[str, str]:
    if not p.keep_first_initial_only:
        return first, second
    letters = [c for c in first if c.isalpha()]
    return (letters[0] if letters else first[:1]), ""


CWTS_NORM = NormProfile(
    strip_diacritics=True,
    drop_non_alpha_from_text=True,
    keep_first_initial_only=True,
    strip_non_numeric_from_numbers=True,
)
IFQ_NORM = NormProfile(
    drop_non_alnum_from_text=True,
    strip_non_numeric_from_numbers=True,
)
STRICT_NORM = NormProfile()
