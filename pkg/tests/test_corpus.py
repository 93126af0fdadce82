from __future__ import annotations

import pytest

from adjuvant_ner import corpus
from adjuvant_ner.corpus import DocumentKind
from adjuvant_ner.errors import (
    ConflictingMapping,
    DuplicateId,
    EmptyField,
    EmptyName,
    MissingColumn,
    StoplistOverlap,
    UnknownFormat,
)
from adjuvant_ner.textnorm import normalize

from conftest import gold_of


def test_load_trials_well_formed(trial_file):
    path = trial_file(
        [
            "NCT00471471\tA vaccine trial\tPatients receive GM-CSF.\tGM-CSF|CpG 7909",
            "NCT00000002\tAnother trial\tSome summary.\t",
        ]
    )
    records = corpus.load_trials(path)
    assert len(records) == 2
    first = records[0]
    assert first.id == "NCT00471471"
    assert first.kind is DocumentKind.TRIAL
    assert first.context == ("GM-CSF", "CpG 7909")
    assert records[1].context is None


def test_load_trials_missing_column(trial_file):
    path = trial_file(["NCT1\tTitle only\tsummary"], header="NCT Number\tTitle\tBrief Summary")
    with pytest.raises(MissingColumn):
        corpus.load_trials(path)


def test_load_trials_short_row(trial_file):
    path = trial_file(["NCT1\tA title\tsummary"])
    with pytest.raises(MissingColumn):
        corpus.load_trials(path)


def test_load_trials_duplicate_id(trial_file):
    path = trial_file(
        [
            "NCT1\tA\tbody.\tx",
            "NCT1\tB\tbody.\ty",
        ]
    )
    with pytest.raises(DuplicateId):
        corpus.load_trials(path)


def test_load_trials_blank_title(trial_file):
    path = trial_file(["NCT1\t  \tbody.\tx"])
    with pytest.raises(EmptyField):
        corpus.load_trials(path)


def test_load_trials_row_order_and_determinism(trial_file):
    rows = [f"NCT{i}\tTitle {i}\tBody {i}.\titem{i}" for i in range(5)]
    path = trial_file(rows)
    first = corpus.load_trials(path)
    second = corpus.load_trials(path)
    assert [r.id for r in first] == [f"NCT{i}" for i in range(5)]
    assert corpus.records_to_jsonl(first) == corpus.records_to_jsonl(second)


def test_load_abstracts(abstract_file):
    path = abstract_file(
        [
            "PMID_26407920\tAdvax study\tDelta inulin works.\tAdvax|delta inulin",
            "PMID_2\tAnother\tBody text.\t",
        ]
    )
    records = corpus.load_abstracts(path)
    assert records[0].kind is DocumentKind.ABSTRACT
    assert records[0].context == ("Advax", "delta inulin")
    assert records[1].context is None


def test_load_abstracts_duplicate_pmid(abstract_file):
    path = abstract_file(
        [
            "PMID_1\tA\tbody.\t",
            "PMID_1\tB\tbody.\t",
        ]
    )
    with pytest.raises(DuplicateId):
        corpus.load_abstracts(path)


def test_context_delimiter_configurable(trial_file):
    path = trial_file(["NCT1\tT\tB.\tGM-CSF; alum"])
    records = corpus.load_trials(path, context_delimiter=";")
    assert records[0].context == ("GM-CSF", "alum")


def test_load_gold_collapses_duplicates(gold_file):
    path = gold_file(["D1\tGM-CSF", "D1\tGM-CSF", "D1\tCpG 7909"])
    gold = corpus.load_gold(path)
    assert gold.entries == {"D1": ("GM-CSF", "CpG 7909")}


def test_load_gold_empty_file(gold_file):
    gold = corpus.load_gold(gold_file([]))
    assert gold.entries == {}


def test_load_gold_blank_name(gold_file):
    with pytest.raises(EmptyName):
        corpus.load_gold(gold_file(["D2\t\t"]))


def test_load_gold_wrong_columns(gold_file):
    with pytest.raises(UnknownFormat):
        corpus.load_gold(gold_file(["D2\ta\tb"]))
    with pytest.raises(UnknownFormat):
        corpus.load_gold(gold_file(["lonely"]))


def test_load_gold_normalization_dedup(gold_file):
    gold = corpus.load_gold(gold_file(["D1\tAdvax", "D1\tADVAX"]))
    assert gold.entries["D1"] == ("Advax",)


def test_load_dictionary_mappings_and_lookup(dict_file):
    path = dict_file(["Advax\tAdvax", "delta inulin\tAdvax", "GLA-SE\tGLA-SE"])
    dictionary = corpus.load_dictionary(path)
    assert dictionary.canonical_for("delta  Inulin") == "Advax"
    assert dictionary.canonical_for("gla-se") == "GLA-SE"
    assert set(dictionary.surface_to_canonical.values()) == {"Advax", "GLA-SE"}


def test_load_dictionary_keys_normalized(dict_file):
    dictionary = corpus.load_dictionary(dict_file(["  Delta   Inulin \tAdvax"]))
    for key in dictionary.surface_to_canonical:
        assert normalize(key) == key


def test_load_dictionary_conflicting_mapping(dict_file):
    path = dict_file(["Advax\tAdvax", "advax\tSomething else"])
    with pytest.raises(ConflictingMapping):
        corpus.load_dictionary(path)


def test_load_dictionary_stoplist_section(dict_file):
    path = dict_file(["Advax\tAdvax", "[stoplist]", "adjuvant", "Vaccine  Adjuvant"])
    dictionary = corpus.load_dictionary(path)
    assert dictionary.is_stoplisted("ADJUVANT")
    assert dictionary.is_stoplisted("vaccine adjuvant")


def test_load_dictionary_stoplist_overlap(dict_file):
    path = dict_file(["adjuvant\tAdjuvant", "[stoplist]", "adjuvant"])
    with pytest.raises(StoplistOverlap):
        corpus.load_dictionary(path)


def test_default_dictionary_seeds():
    dictionary = corpus.SynonymDictionary.default()
    assert dictionary.is_stoplisted("adjuvant")
    assert dictionary.is_stoplisted("immunostimulant")
    assert dictionary.surface_to_canonical == {}


def test_validate_corpus_partition(trial_file):
    path = trial_file(
        [
            "NCT1\tA\tbody.\tx",
            "NCT2\tB\tbody.\ty",
            "NCT3\tC\tbody.\tz",
        ]
    )
    records = corpus.load_trials(path)
    gold = gold_of({"NCT1": ["alum"], "NCT2": ["GM-CSF"], "NCTX": ["Advax"]})
    check = corpus.validate_corpus(records, gold)
    assert check.missing_from_corpus == ("NCTX",)
    assert check.unannotated == ("NCT3",)
    matched = set(gold.entries) - set(check.missing_from_corpus)
    assert matched | set(check.missing_from_corpus) == set(gold.entries)


def test_validate_corpus_all_covered(trial_file):
    records = corpus.load_trials(trial_file(["NCT1\tA\tbody.\tx"]))
    check = corpus.validate_corpus(records, gold_of({"NCT1": ["alum"]}))
    assert check.missing_from_corpus == ()
    assert check.unannotated == ()
