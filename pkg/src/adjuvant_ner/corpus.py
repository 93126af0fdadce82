"""Load and validate the document collections, gold annotations, and synonym dictionary.

All four inputs are UTF-8 tab-separated text. Trial and abstract files carry a
mandatory header row; gold and dictionary files do not. Loading is
single-threaded and the returned collections are immutable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import (
    ConflictingMapping,
    DuplicateId,
    EmptyField,
    EmptyName,
    MissingColumn,
    StoplistOverlap,
    UnknownFormat,
)
from .textnorm import normalize

STOPLIST_MARKER = "[stoplist]"

# Generic terms that carry no specific adjuvant identity.
SEED_STOPLIST = ("adjuvant", "vaccine adjuvant", "immunostimulant")


class DocumentKind(str, Enum):
    ABSTRACT = "abstract"
    TRIAL = "trial"


@dataclass(frozen=True, slots=True)
class DocumentRecord:
    """One trial or abstract; `context` holds interventions or substances."""

    id: str
    kind: DocumentKind
    title: str
    body: str
    context: tuple[str, ...] | None = None


@dataclass(frozen=True, slots=True)
class GoldSet:
    """Per-document reference adjuvant names, deduplicated under normalization."""

    entries: dict[str, tuple[str, ...]]

    def names_for(self, doc_id: str) -> tuple[str, ...]:
        return self.entries.get(doc_id, ())

    def normalized_for(self, doc_id: str) -> dict[str, str]:
        """Map normalized gold name -> original surface form for one document."""
        return {normalize(n): n for n in self.entries.get(doc_id, ())}

    def total_names(self) -> int:
        return sum(len(v) for v in self.entries.values())


@dataclass(frozen=True, slots=True)
class SynonymDictionary:
    """Normalized surface form -> canonical adjuvant name, plus a stoplist."""

    surface_to_canonical: dict[str, str] = field(default_factory=dict)
    stoplist: frozenset[str] = frozenset()

    @classmethod
    def default(cls) -> "SynonymDictionary":
        return cls(surface_to_canonical={}, stoplist=frozenset(SEED_STOPLIST))

    def canonical_for(self, name: str) -> str | None:
        return self.surface_to_canonical.get(normalize(name))

    def is_stoplisted(self, name: str) -> bool:
        return normalize(name) in self.stoplist


@dataclass(frozen=True, slots=True)
class CorpusReport:
    """Cross-check of corpus ids against gold ids; report-only."""

    missing_from_corpus: tuple[str, ...]
    unannotated: tuple[str, ...]


def _read_rows(path: str | Path) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        return [row for row in reader]


def _split_context(cell: str, delimiter: str) -> tuple[str, ...] | None:
    items = tuple(part.strip() for part in cell.split(delimiter) if part.strip())
    return items or None


def _load_documents(
    path: str | Path,
    kind: DocumentKind,
    columns: tuple[str, str, str, str],
    context_delimiter: str,
) -> list[DocumentRecord]:
    rows = _read_rows(path)
    if not rows:
        raise UnknownFormat(f"{path}: empty file, header row required")
    header = [cell.strip() for cell in rows[0]]
    try:
        indexes = [header.index(col) for col in columns]
    except ValueError as exc:
        missing = [col for col in columns if col not in header]
        raise MissingColumn(f"{path}: header lacks column(s) {missing}") from exc

    records: list[DocumentRecord] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) <= max(indexes):
            raise MissingColumn(
                f"{path}:{lineno}: row has {len(row)} column(s), expected at least {max(indexes) + 1}"
            )
        doc_id, title, body, context_cell = (row[i].strip() for i in indexes)
        if not doc_id:
            raise EmptyField(f"{path}:{lineno}: empty identifier")
        if doc_id in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate identifier {doc_id!r}")
        if not title or not body:
            raise EmptyField(f"{path}:{lineno}: blank title or body for {doc_id!r}")
        seen.add(doc_id)
        records.append(
            DocumentRecord(
                id=doc_id,
                kind=kind,
                title=title,
                body=body,
                context=_split_context(context_cell, context_delimiter),
            )
        )
    return records


def load_trials(path: str | Path, context_delimiter: str = "|") -> list[DocumentRecord]:
    """Load clinical trial records: NCT Number, Title, Brief Summary, Interventions."""
    return _load_documents(
        path,
        DocumentKind.TRIAL,
        ("NCT Number", "Title", "Brief Summary", "Interventions"),
        context_delimiter,
    )


def load_abstracts(path: str | Path, context_delimiter: str = "|") -> list[DocumentRecord]:
    """Load article abstracts: PMID, Title, Abstract, Substances."""
    return _load_documents(
        path,
        DocumentKind.ABSTRACT,
        ("PMID", "Title", "Abstract", "Substances"),
        context_delimiter,
    )


def load_gold(path: str | Path) -> GoldSet:
    """Load the two-column (document id, adjuvant name) annotation file."""
    entries: dict[str, list[str]] = {}
    for lineno, row in enumerate(_read_rows(path), start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        # Trailing empty cells collapse onto the two-column shape.
        if len(cells) > 2 and any(cells[2:]):
            raise UnknownFormat(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        if len(cells) < 2:
            raise UnknownFormat(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        doc_id, name = cells[0], cells[1]
        if not doc_id or not name:
            raise EmptyName(f"{path}:{lineno}: blank id or adjuvant name")
        bucket = entries.setdefault(doc_id, [])
        if normalize(name) not in {normalize(n) for n in bucket}:
            bucket.append(name)
    return GoldSet(entries={k: tuple(v) for k, v in entries.items()})


def load_dictionary(path: str | Path) -> SynonymDictionary:
    """Load surface->canonical mappings plus the optional ``[stoplist]`` section."""
    mapping: dict[str, str] = {}
    stoplist: set[str] = set()
    in_stoplist = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.lower() == STOPLIST_MARKER:
                in_stoplist = True
                continue
            if in_stoplist:
                stoplist.add(normalize(stripped))
                continue
            cells = [c.strip() for c in stripped.split("\t")]
            if len(cells) != 2 or not cells[0] or not cells[1]:
                raise UnknownFormat(f"{path}:{lineno}: expected 'surface<TAB>canonical'")
            key = normalize(cells[0])
            if key in mapping and mapping[key] != cells[1]:
                raise ConflictingMapping(
                    f"{path}:{lineno}: {cells[0]!r} maps to both {mapping[key]!r} and {cells[1]!r}"
                )
            mapping[key] = cells[1]
    overlap = stoplist & mapping.keys()
    if overlap:
        raise StoplistOverlap(f"{path}: term(s) in both stoplist and mapping: {sorted(overlap)}")
    return SynonymDictionary(surface_to_canonical=mapping, stoplist=frozenset(stoplist))


def validate_corpus(records: Iterable[DocumentRecord], gold: GoldSet) -> CorpusReport:
    """List gold ids absent from the corpus and corpus ids with no gold entry."""
    corpus_ids = {r.id for r in records}
    gold_ids = set(gold.entries)
    return CorpusReport(
        missing_from_corpus=tuple(sorted(gold_ids - corpus_ids)),
        unannotated=tuple(sorted(corpus_ids - gold_ids)),
    )


def records_to_jsonl(records: Iterable[DocumentRecord]) -> str:
    """Deterministic serialization, used for determinism checks and debugging."""
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "id": r.id,
                    "kind": r.kind.value,
                    "title": r.title,
                    "body": r.body,
                    "context": list(r.context) if r.context else None,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    return "\n".join(lines)
