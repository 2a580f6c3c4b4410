"""Versioned flat-file formats.

Record files are UTF-8 JSON lines. The first line is a header object
``{"format": "citematch/<kind>", "version": 1}``; each further line is one
record with named fields. Logs and annotation exports are tab-separated with
a ``#citematch:<kind>:1`` first line followed by a column header.

A secondary reader parses compact cited-reference strings of the form
``AUTHOR IN, YYYY, PUBNAME, Vn, Pn, DOI d``.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from citematch.model import (
    Author,
    CitedReference,
    Domain,
    GroundTruthLink,
    MatchRecord,
    Outcome,
    SourceArticle,
    TargetArticle,
)

VERSION = 1


@dataclass(frozen=True)
class LineError:
    line: int
    field: str
    message: str

    def __str__(self) -> str:
        where = f" field {self.field!r}" if self.field else ""
        return f"line {self.line}{where}: {self.message}"


class FormatError(ValueError):
    """A file failed to parse; ``errors`` lists every offending line."""

    def __init__(self, path: str | Path, errors: Sequence[LineError]):
        self.path = str(path)
        self.errors = list(errors)
        shown = "; ".join(str(e) for e in self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"{self.path}: {shown}{more}")


# --- per-kind (de)serialization ------------------------------------------------


def _str(v: Any) -> str:
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


def _int(v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _opt_int(v: Any) -> int | None:
    return None if v is None else _int(v)


def _opt_str(v: Any) -> str | None:
    return None if v is None else _str(v)


def _bool(v: Any) -> bool:
    if not isinstance(v, bool):
        raise TypeError("expected true or false")
    return v


def _str_tuple(v: Any) -> tuple[str, ...]:
    if not isinstance(v, list):
        raise TypeError("expected a list of strings")
    return tuple(_str(x) for x in v)


def _authors(v: Any) -> tuple[Author, ...]:
    if not isinstance(v, list):
        raise TypeError("expected a list of [last, initials] pairs")
    out = []
    for item in v:
        if not (isinstance(item, list) and len(item) == 2):
            raise TypeError("expected a list of [last, initials] pairs")
        out.append(Author(_str(item[0]), _str(item[1])))
    return tuple(out)


def _pairs(v: Any) -> tuple[tuple[str, int], ...]:
    if not isinstance(v, list):
        raise TypeError("expected a list of [target_id, rule_index] pairs")
    out = []
    for item in v:
        if not (isinstance(item, list) and len(item) == 2):
            raise TypeError("expected a list of [target_id, rule_index] pairs")
        out.append((_str(item[0]), _int(item[1])))
    return tuple(out)


def _enum(cls: type) -> Callable[[Any], Any]:
    def conv(v: Any) -> Any:
        try:
            return cls(_str(v))
        except ValueError:
            raise ValueError(f"expected one of {[e.value for e in cls]}") from None

    return conv


@dataclass(frozen=True)
class _Kind:
    name: str
    cls: type
    converters: dict[str, Callable[[Any], Any]]
    optional: frozenset[str] = frozenset()


KINDS = {
    "targets": _Kind(
        "targets",
        TargetArticle,
        {
            "id": _str,
            "first_author_last": _str,
            "first_initial": _str,
            "second_initial": _str,
            "all_authors": _authors,
            "pub_year": _int,
            "pub_name_full": _str,
            "pub_name_abbrevs": _str_tuple,
            "volume": _str,
            "issue": _str,
            "start_page": _str,
            "end_page": _str,
            "doi": _str,
            "article_title": _str,
            "domain_tag": _enum(Domain),
            "accumulated_citations": _int,
        },
    ),
    "refs": _Kind(
        "refs",
        CitedReference,
        {
            "ref_id": _str,
            "source_article_id": _str,
            "first_author_last": _str,
            "first_initial": _str,
            "second_initial": _str,
            "pub_year": _opt_int,
            "pub_name": _str,
            "volume": _str,
            "issue": _str,
            "start_page": _str,
            "doi": _str,
        },
    ),
    "links": _Kind(
        "links",
        GroundTruthLink,
        {
            "ref_id": _str,
            "true_target_id": _opt_str,
            "truly_cites": _bool,
            "phantom_target_id": _opt_str,
        },
        frozenset({"truly_cites", "phantom_target_id"}),
    ),
    "sources": _Kind("sources", SourceArticle, {"id": _str, "domain_tag": _enum(Domain)}),
    "matches": _Kind(
        "matches",
        MatchRecord,
        {
            "ref_id": _str,
            "outcome": _enum(Outcome),
            "matched_targets": _pairs,
            "selected_target": _opt_str,
        },
        frozenset({"matched_targets", "selected_target"}),
    ),
}


def _plain(v: Any) -> Any:
    if isinstance(v, Author):
        return [v.last, v.initials]
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    if isinstance(v, Enum):
        return v.value
    return v


def record_to_dict(rec: Any) -> dict[str, Any]:
    return {f.name: _plain(getattr(rec, f.name)) for f in fields(rec)}


def header(kind: str) -> str:
    return json.dumps({"format": f"citematch/{kind}", "version": VERSION}, sort_keys=True)


def dumps_records(kind: str, records: Iterable[Any]) -> str:
    lines = [header(kind)]
    lines += [json.dumps(record_to_dict(r), ensure_ascii=False, sort_keys=True) for r in records]
    return "\n".join(lines) + "\n"


def _check_header(path: str | Path, first: str, kind: str) -> None:
    try:
        h = json.loads(first)
    except json.JSONDecodeError:
        raise FormatError(path, [LineError(1, "", "missing citematch header line")]) from None
    if not isinstance(h, dict) or h.get("format") != f"citematch/{kind}":
        raise FormatError(path, [LineError(1, "format", f"expected citematch/{kind}, got {h!r}")])
    if h.get("version") != VERSION:
        raise FormatError(path, [LineError(1, "version", f"unsupported version {h.get('version')!r}")])


def loads_records(kind: str, text: str, path: str | Path = "<string>") -> list[Any]:
    """Parse a record file; every malformed line is reported, none dropped."""
    spec = KINDS[kind]
    lines = text.splitlines()
    if not lines:
        return []
    _check_header(path, lines[0], kind)
    out, errors = [], []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(LineError(n, "", f"invalid JSON ({exc.msg})"))
            continue
        if not isinstance(raw, dict):
            errors.append(LineError(n, "", "expected a JSON object"))
            continue
        unknown = sorted(set(raw) - set(spec.converters))
        if unknown:
            errors.append(LineError(n, unknown[0], "unknown field"))
            continue
        values, bad = {}, None
        for name, conv in spec.converters.items():
            if name not in raw:
                if name in spec.optional:
                    continue
                bad = LineError(n, name, "missing mandatory field")
                break
            try:
                values[name] = conv(raw[name])
            except (TypeError, ValueError) as exc:
                bad = LineError(n, name, str(exc))
                break
        if bad is None:
            try:
                out.append(spec.cls(**values))
            except ValueError as exc:
                bad = LineError(n, "", str(exc))
        if bad is not None:
            errors.append(bad)
    if errors:
        raise FormatError(path, errors)
    return out


def read_records(kind: str, path: str | Path) -> list[Any]:
    return loads_records(kind, Path(path).read_text(encoding="utf-8"), path)


def parse_targets_file(path: str | Path) -> list[TargetArticle]:
    return read_records("targets", path)


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_records(kind: str, path: str | Path, records: Iterable[Any]) -> None:
    atomic_write(path, dumps_records(kind, records))


# --- delimited logs ------------------------------------------------------------


def _cell(v: Any) -> str:
    s = "" if v is None else str(_plain(v))
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _uncell(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"t": "\t", "n": "\n", "r": "\r"}.get(m.group(1), m.group(1)), s)


def dumps_table(kind: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [f"#citematch:{kind}:{VERSION}", "\t".join(columns)]
    lines += ["\t".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def loads_table(kind: str, text: str, path: str | Path = "<string>") -> list[dict[str, str]]:
    # only \n separates rows; cells may hold any other line-break character
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        return []
    if lines[0] != f"#citematch:{kind}:{VERSION}":
        raise FormatError(path, [LineError(1, "", f"expected header #citematch:{kind}:{VERSION}")])
    if len(lines) < 2:
        raise FormatError(path, [LineError(2, "", "missing column header")])
    cols = lines[1].split("\t")
    out, errors = [], []
    for n, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != len(cols):
            errors.append(LineError(n, "", f"expected {len(cols)} columns, got {len(cells)}"))
            continue
        out.append({c: _uncell(v) for c, v in zip(cols, cells)})
    if errors:
        raise FormatError(path, errors)
    return out


# --- compact reference strings -------------------------------------------------

_AUTHOR = re.compile(r"^(?P<last>.+?)(?:\s+(?P<initials>(?:[A-Z]\.?){1,3}))?$")
_YEAR = re.compile(r"^\d{4}$")
_TAGGED = re.compile(r"^(?:[VP]\S*\d\S*|DOI\s.*)$")


def parse_compact_reference(text: str, ref_id: str, source_article_id: str = "") -> CitedReference:
    """Parse ``AUTHOR IN, YYYY, PUBNAME, Vn, Pn, DOI d`` into a reference.

    Elements after the publication name are recognized by their tag
    (``V``, ``P``, ``DOI``); any may be absent. The initials are the trailing
    run of up to three capitals (optionally dotted) after the last name; the first two become
    first and second initial.
    """
    parts = [p.strip() for p in text.strip().split(",")]
    if len(parts) < 2 or not parts[0]:
        raise ValueError(f"not a compact reference: {text!r}")
    m = _AUTHOR.match(parts[0])
    assert m is not None
    last, initials = m.group("last"), (m.group("initials") or "").replace(".", "")
    year: int | None = None
    rest = parts[1:]
    if rest and _YEAR.match(rest[0]):
        year = int(rest.pop(0))
    pub_name = ""
    if rest and not _TAGGED.match(rest[0]):
        pub_name = rest.pop(0)
    volume = start_page = doi = ""
    for p in rest:
        if p.startswith("DOI "):
            doi = p[4:].strip()
        elif _TAGGED.match(p) and p[0] == "V":
            volume = p[1:]
        elif _TAGGED.match(p) and p[0] == "P":
            start_page = p[1:]
        else:
            raise ValueError(f"unrecognized element {p!r} in {text!r}")
    return CitedReference(
        ref_id=ref_id,
        source_article_id=source_article_id,
        first_author_last=last,
        first_initial=initials[:1],
        second_initial=initials[1:2],
        pub_year=year,
        pub_name=pub_name,
        volume=volume,
        issue="",
        start_page=start_page,
        doi=doi,
    )


def format_compact_reference(r: CitedReference) -> str:
    parts = [f"{r.first_author_last} {r.first_initial}{r.second_initial}".strip()]
    if r.pub_year is not None:
        parts.append(str(r.pub_year))
    if r.pub_name:
        parts.append(r.pub_name)
    if r.volume:
        parts.append(f"V{r.volume}")
    if r.start_page:
        parts.append(f"P{r.start_page}")
    if r.doi:
        parts.append(f"DOI {r.doi}")
    return ", ".join(parts)


def read_compact_references(path: str | Path) -> list[CitedReference]:
    """One compact reference per line; ids are ``L<line number>``."""
    out, errors = [], []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            out.append(parse_compact_reference(line, f"L{n}"))
        except ValueError as exc:
            errors.append(LineError(n, "", str(exc)))
    if errors:
        raise FormatError(path, errors)
    return out
