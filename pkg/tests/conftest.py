from __future__ import annotations

import pytest

from adjuvant_ner.corpus import DocumentKind, DocumentRecord, GoldSet, SynonymDictionary


def make_record(
    doc_id: str = "NCT00000001",
    kind: DocumentKind = DocumentKind.TRIAL,
    title: str = "A trial of something",
    body: str = "Participants receive a vaccine with GM-CSF as adjuvant.",
    context: tuple[str, ...] | None = ("GM-CSF", "peptide vaccine"),
) -> DocumentRecord:
    return DocumentRecord(id=doc_id, kind=kind, title=title, body=body, context=context)


@pytest.fixture
def trial_file(tmp_path):
    def write(rows, header="NCT Number\tTitle\tBrief Summary\tInterventions"):
        path = tmp_path / "trials.tsv"
        path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
        return path

    return write


@pytest.fixture
def abstract_file(tmp_path):
    def write(rows, header="PMID\tTitle\tAbstract\tSubstances"):
        path = tmp_path / "abstracts.tsv"
        path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
        return path

    return write


@pytest.fixture
def gold_file(tmp_path):
    def write(rows):
        path = tmp_path / "gold.tsv"
        path.write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8")
        return path

    return write


@pytest.fixture
def dict_file(tmp_path):
    def write(lines):
        path = tmp_path / "dictionary.tsv"
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        return path

    return write


def gold_of(entries: dict[str, list[str]]) -> GoldSet:
    return GoldSet(entries={k: tuple(v) for k, v in entries.items()})


def dictionary_of(
    mapping: dict[str, str] | None = None, stoplist: tuple[str, ...] = ()
) -> SynonymDictionary:
    return SynonymDictionary(
        surface_to_canonical=dict(mapping or {}), stoplist=frozenset(stoplist)
    )
