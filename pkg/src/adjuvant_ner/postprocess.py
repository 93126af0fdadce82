"""Recover (id, adjuvant name) rows from raw model text.

Cleaning rules, applied line by line:
- prose lines (``### Output:`` and the like) are discarded;
- a header line (``PMID<TAB>Adjuvant Name`` / ``NCT Number<TAB>Adjuvant Name``,
  whitespace-tolerant) is skipped with a warning;
- a data line is ``id`` + separator + ``name`` where the separator is a tab
  or a run of two or more spaces;
- the first standalone ``Done`` line (case-insensitive) ends the table; any
  non-blank content after it is flagged, not parsed;
- a degenerate space-joined line is re-segmented on known id prefixes
  (``PMID_``, ``NCT``) unless strict-tab mode is on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptyResponse, MissingDoneMarker, ParseError
from .textnorm import normalize

DEFAULT_CAP = 3

_ID_TOKEN = re.compile(r"PMID_\w+|NCT\d+")
_HEADER_LINE = re.compile(r"^(?:PMID|NCT\s+Number)\s+Adjuvant\s+Name$", re.IGNORECASE)
_HEADER_ANYWHERE = re.compile(r"(?:PMID|NCT\s+Number)\s+Adjuvant\s+Name", re.IGNORECASE)
_DATA_LINE = re.compile(r"^(\S+)(?:\t+| {2,})\s*(\S.*)$")
_STRICT_DATA_LINE = re.compile(r"^(\S+)\t+\s*(\S.*)$")


class ParseWarning(str, Enum):
    TRAILING_CONTENT_AFTER_DONE = "TrailingContentAfterDone"
    HEADER_ROW_SKIPPED = "HeaderRowSkipped"
    DUPLICATE_ROW_DROPPED = "DuplicateRowDropped"
    OVER_CAP_TRUNCATED = "OverCapTruncated"
    FOREIGN_ID_DROPPED = "ForeignIdDropped"


@dataclass(frozen=True, slots=True)
class Extraction:
    doc_id: str
    name: str
    source_run: int = 0


@dataclass(slots=True)
class ParseResult:
    extractions: list[Extraction]
    done_seen: bool
    warnings: list[ParseWarning] = field(default_factory=list)
    error: ParseError | None = None


class _Warnings:
    """Ordered, deduplicated warning collector."""

    def __init__(self) -> None:
        self.items: list[ParseWarning] = []

    def add(self, warning: ParseWarning) -> None:
        if warning not in self.items:
            self.items.append(warning)


def _resegment(line: str, rows: list[tuple[str, str]], warnings: _Warnings, done_seen: bool) -> bool:
    """Token-walk a space-joined line; returns the updated done_seen flag."""
    current_id: str | None = None
    buffer: list[str] = []
    prefix: list[str] = []

    def flush() -> None:
        if current_id is None:
            return
        name = " ".join(buffer)
        if not name:
            return
        if normalize(name) == "adjuvant name":
            warnings.add(ParseWarning.HEADER_ROW_SKIPPED)
            return
        rows.append((current_id, name))

    for token in line.split():
        if done_seen:
            warnings.add(ParseWarning.TRAILING_CONTENT_AFTER_DONE)
            break
        if _ID_TOKEN.fullmatch(token):
            flush()
            current_id, buffer = token, []
        elif token.casefold() == "done":
            flush()
            current_id, buffer = None, []
            done_seen = True
        elif current_id is None:
            prefix.append(token)
        else:
            buffer.append(token)
    flush()
    if prefix and _HEADER_ANYWHERE.search(" ".join(prefix)):
        warnings.add(ParseWarning.HEADER_ROW_SKIPPED)
    return done_seen


def extract_table(
    raw: str, strict_tabs: bool = False
) -> tuple[list[tuple[str, str]], bool, list[ParseWarning]]:
    """Scan raw model output for table rows and the completion sentinel."""
    rows: list[tuple[str, str]] = []
    warnings = _Warnings()
    done_seen = False
    data_line = _STRICT_DATA_LINE if strict_tabs else _DATA_LINE

    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if done_seen:
            warnings.add(ParseWarning.TRAILING_CONTENT_AFTER_DONE)
            continue
        if stripped.casefold() == "done":
            done_seen = True
            continue
        if _HEADER_LINE.match(stripped):
            warnings.add(ParseWarning.HEADER_ROW_SKIPPED)
            continue
        if not strict_tabs and _ID_TOKEN.search(stripped):
            done_seen = _resegment(stripped, rows, warnings, done_seen)
            continue
        match = data_line.match(stripped)
        if match:
            rows.append((match.group(1), match.group(2).strip()))
        # anything else is prose; dropped silently
    return rows, done_seen, warnings.items


def parse_response(
    raw: str,
    expected_id: str,
    cap: int = DEFAULT_CAP,
    run: int = 0,
    strict_tabs: bool = False,
) -> ParseResult:
    """Parse one model response for one document.

    Foreign-id rows are dropped, duplicates collapse case-insensitively to the
    first occurrence, and at most ``cap`` names survive. A missing ``Done``
    sentinel is a typed error and yields no extractions.
    """
    if not raw.strip():
        return ParseResult([], False, [], EmptyResponse("blank model response"))

    rows, done_seen, raw_warnings = extract_table(raw, strict_tabs=strict_tabs)
    warnings = _Warnings()
    for w in raw_warnings:
        warnings.add(w)

    kept: list[Extraction] = []
    seen_names: set[str] = set()
    for doc_id, name in rows:
        if doc_id != expected_id:
            warnings.add(ParseWarning.FOREIGN_ID_DROPPED)
            continue
        key = normalize(name)
        if key in seen_names:
            warnings.add(ParseWarning.DUPLICATE_ROW_DROPPED)
            continue
        seen_names.add(key)
        if len(kept) >= cap:
            warnings.add(ParseWarning.OVER_CAP_TRUNCATED)
            continue
        kept.append(Extraction(doc_id=doc_id, name=name, source_run=run))

    if not done_seen:
        return ParseResult([], False, warnings.items, MissingDoneMarker("no Done sentinel in response"))
    return ParseResult(kept, True, warnings.items, None)


def to_table(extractions: list[Extraction]) -> str:
    """Canonical serialization: one tab-separated row per extraction, then Done."""
    lines = [f"{e.doc_id}\t{e.name}" for e in extractions]
    lines.append("Done")
    return "\n".join(lines)
