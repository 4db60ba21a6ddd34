"""Turn downloaded bibliography files and tabular database exports into
Abstract records.

Both parsers read already-downloaded local files; fetching metadata from
an anthology website or a literature database is a manual step documented
in the README. Field values are whitespace-collapsed and brace-stripped,
since bibliography files wrap long values over indented lines.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

from .errors import ConfigError, EmptyResultError, ParseError
from .records import DISCIPLINES, Abstract

_ENTRY_START = re.compile(r"@(\w+)\s*\{", re.ASCII)
_WS = re.compile(r"\s+")


@dataclass
class IngestResult:
    abstracts: list[Abstract]
    n_entries: int = 0          # entries / data rows seen
    n_skipped: int = 0          # entries without a usable abstract
    row_errors: list[str] = field(default_factory=list)

    def summary(self) -> str:
        return (f"read {self.n_entries}, extracted {len(self.abstracts)}, "
                f"skipped {self.n_skipped}, errors {len(self.row_errors)}")


def _clean_value(raw: str) -> str:
    return _WS.sub(" ", raw).replace("{", "").replace("}", "").strip()


def _parse_fields(body: str, key: str) -> dict[str, str]:
    """Parse ``name = value`` pairs from an entry body (braces balanced)."""
    fields: dict[str, str] = {}
    i, n = 0, len(body)
    while i < n:
        while i < n and (body[i].isspace() or body[i] == ","):
            i += 1
        if i >= n:
            break
        m = re.match(r"([\w-]+)\s*=\s*", body[i:])
        if not m:
            raise ParseError(f"entry {key!r}: expected 'field = value' at offset {i}")
        name = m.group(1).lower()
        i += m.end()
        if i >= n:
            raise ParseError(f"entry {key!r}: field {name!r} has no value")
        ch = body[i]
        if ch == "{":
            depth, j = 0, i
            while j < n:
                if body[j] == "{":
                    depth += 1
                elif body[j] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth != 0:
                raise ParseError(f"entry {key!r}: unbalanced braces in field {name!r}")
            fields[name] = _clean_value(body[i + 1:j])
            i = j + 1
        elif ch == '"':
            j = body.find('"', i + 1)
            if j < 0:
                raise ParseError(f"entry {key!r}: unterminated quoted value in field {name!r}")
            fields[name] = _clean_value(body[i + 1:j])
            i = j + 1
        else:
            j = i
            while j < n and body[j] not in ",\n":
                j += 1
            fields[name] = body[i:j].strip()
            i = j
    return fields


def parse_bib(file_text: str, discipline: str | None = None) -> IngestResult:
    """Extract one Abstract per bibliography entry with an abstract field.

    Entries without an abstract are counted and skipped. ``discipline``,
    when given, is stamped into every record's meta.
    """
    if discipline is not None and discipline not in DISCIPLINES:
        raise ConfigError(f"discipline must be one of {DISCIPLINES}, got {discipline!r}")
    result = IngestResult(abstracts=[])
    for m in _ENTRY_START.finditer(file_text):
        entry_type = m.group(1).lower()
        if entry_type in ("comment", "preamble", "string"):
            continue
        # entry key runs to the first comma
        key_end = file_text.find(",", m.end())
        brace_probe = file_text.find("}", m.end())
        if key_end < 0 or (0 <= brace_probe < key_end):
            raise ParseError(f"truncated entry near offset {m.start()}")
        key = file_text[m.end():key_end].strip()

        # body ends where braces balance out
        depth, j = 1, key_end + 1
        while j < len(file_text) and depth > 0:
            if file_text[j] == "{":
                depth += 1
            elif file_text[j] == "}":
                depth -= 1
            j += 1
        if depth != 0:
            raise ParseError(f"entry {key!r}: unbalanced braces (truncated file?)")
        body = file_text[key_end + 1:j - 1]

        result.n_entries += 1
        fields = _parse_fields(body, key)
        abstract_text = fields.get("abstract", "").strip()
        if not abstract_text:
            result.n_skipped += 1
            continue
        meta = {}
        venue = fields.get("journal") or fields.get("booktitle")
        if venue:
            meta["venue"] = venue
        if fields.get("year"):
            meta["year"] = fields["year"]
        if fields.get("title"):
            meta["title"] = fields["title"]
        if discipline:
            meta["discipline"] = discipline
        result.abstracts.append(Abstract(id=key, text=abstract_text, meta=meta))
    if not result.abstracts:
        raise EmptyResultError(
            f"no abstracts extracted ({result.n_entries} entries, "
            f"{result.n_skipped} without abstract field)")
    return result


def parse_tabular_export(file_text: str, column_map: dict[str, str],
                         delimiter: str | None = None,
                         discipline: str | None = None) -> IngestResult:
    """Extract Abstracts from a delimited export with a header row.

    ``column_map`` maps the logical names ``abstract`` (required) and
    optionally ``title``/``year``/``venue`` to header column names.
    Rows whose field count disagrees with the header are collected as
    row-level errors, not fatal.
    """
    if "abstract" not in column_map:
        raise ConfigError("column_map must map 'abstract' to a column name")
    if discipline is not None and discipline not in DISCIPLINES:
        raise ConfigError(f"discipline must be one of {DISCIPLINES}, got {discipline!r}")
    if not file_text.strip():
        raise EmptyResultError("empty tabular file")
    if delimiter is None:
        first_line = file_text.splitlines()[0]
        delimiter = "\t" if "\t" in first_line else ","

    reader = csv.reader(io.StringIO(file_text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyResultError("tabular file has no header row") from None
    col_index: dict[str, int] = {}
    for logical, column in column_map.items():
        if column not in header:
            raise ConfigError(f"mapped column {column!r} (for {logical!r}) "
                              f"not in header {header}")
        col_index[logical] = header.index(column)

    result = IngestResult(abstracts=[])
    for rownum, row in enumerate(reader, start=1):
        if not row:
            continue
        result.n_entries += 1
        if len(row) != len(header):
            result.row_errors.append(
                f"row {rownum}: {len(row)} fields, header has {len(header)}")
            continue
        abstract_text = row[col_index["abstract"]].strip()
        if not abstract_text:
            result.n_skipped += 1
            continue
        meta = {}
        for key in ("title", "year", "venue"):
            if key in col_index and row[col_index[key]].strip():
                meta[key] = row[col_index[key]].strip()
        if discipline:
            meta["discipline"] = discipline
        result.abstracts.append(Abstract(id=rownum, text=_WS.sub(" ", abstract_text),
                                         meta=meta))
    if not result.abstracts:
        raise EmptyResultError(
            f"no abstracts extracted ({result.n_entries} rows, "
            f"{result.n_skipped} with empty abstract cell)")
    return result
