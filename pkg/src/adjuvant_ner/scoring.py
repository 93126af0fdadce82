"""Classify extractions against gold names and compute the evaluation metrics.

Matching is exact and case-insensitive, optionally routed through the synonym
dictionary. Two metric modes exist side by side:

literal mode
    precision = (TP - nonspecific) / TP
    recall    = TP / (total identifications + missed instances)

standard mode
    precision = TP / (TP + FP)   with FP = nonspecific + mismatches
    recall    = TP / (TP + FN)   with FN = missed instances

F1 is the harmonic mean in both modes. Undefined metrics are reported as
absent, never coerced to 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .corpus import GoldSet, SynonymDictionary
from .errors import DuplicateVerdict, UndefinedMetric, VerdictForNonMismatch
from .postprocess import Extraction
from .textnorm import normalize

__all__ = [
    "OutcomeClass",
    "MatchOutcome",
    "MetricCounts",
    "FinalDecision",
    "normalize",
    "match_extraction",
    "tally",
    "precision_paper",
    "recall_paper",
    "precision_standard",
    "recall_standard",
    "f1",
    "apply_verdicts",
]


class OutcomeClass(str, Enum):
    TRUE_POSITIVE = "true_positive"
    NONSPECIFIC = "nonspecific"
    MISMATCH = "mismatch"


@dataclass(frozen=True, slots=True)
class MatchOutcome:
    extraction: Extraction
    label: OutcomeClass
    matched_gold: str | None = None
    canonical: str | None = None
    valid_but_unlisted: bool = False


@dataclass(frozen=True, slots=True)
class MetricCounts:
    total_identifications: int
    true_positives: int
    nonspecific: int
    mismatches: int
    missed: int


@dataclass(frozen=True, slots=True)
class FinalDecision:
    """An exported adjudication decision keyed by (doc_id, extracted name)."""

    doc_id: str
    name: str
    valid: bool
    gold_linkage: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, normalize(self.name))


def match_extraction(
    extraction: Extraction, gold: GoldSet, dictionary: SynonymDictionary
) -> MatchOutcome:
    """Classify one extraction: stoplist, direct gold match, dictionary match, else mismatch."""
    key = normalize(extraction.name)
    if key in dictionary.stoplist:
        return MatchOutcome(extraction, OutcomeClass.NONSPECIFIC)
    gold_by_norm = gold.normalized_for(extraction.doc_id)
    if key in gold_by_norm:
        return MatchOutcome(extraction, OutcomeClass.TRUE_POSITIVE, matched_gold=gold_by_norm[key])
    canonical = dictionary.surface_to_canonical.get(key)
    if canonical is not None and normalize(canonical) in gold_by_norm:
        return MatchOutcome(
            extraction,
            OutcomeClass.TRUE_POSITIVE,
            matched_gold=gold_by_norm[normalize(canonical)],
            canonical=canonical,
        )
    return MatchOutcome(extraction, OutcomeClass.MISMATCH)


def tally(outcomes: Iterable[MatchOutcome], gold: GoldSet) -> MetricCounts:
    """Aggregate outcome counts; a gold name matched twice counts once toward coverage."""
    outcomes = list(outcomes)
    by_label = {label: 0 for label in OutcomeClass}
    covered: set[tuple[str, str]] = set()
    for outcome in outcomes:
        by_label[outcome.label] += 1
        if outcome.label is OutcomeClass.TRUE_POSITIVE and outcome.matched_gold is not None:
            covered.add((outcome.extraction.doc_id, normalize(outcome.matched_gold)))
    missed = sum(
        1
        for doc_id, names in gold.entries.items()
        for name in names
        if (doc_id, normalize(name)) not in covered
    )
    return MetricCounts(
        total_identifications=len(outcomes),
        true_positives=by_label[OutcomeClass.TRUE_POSITIVE],
        nonspecific=by_label[OutcomeClass.NONSPECIFIC],
        mismatches=by_label[OutcomeClass.MISMATCH],
        missed=missed,
    )


def precision_paper(counts: MetricCounts) -> float:
    # (TP - nonspecific) / TP, literally; a value outside [0, 1] (more
    # nonspecific outputs than true positives) is reported as absent.
    if counts.true_positives == 0:
        raise UndefinedMetric("precision undefined: no true positives")
    value = (counts.true_positives - counts.nonspecific) / counts.true_positives
    if value < 0:
        raise UndefinedMetric("precision undefined: nonspecific outputs exceed true positives")
    return value


def recall_paper(counts: MetricCounts) -> float:
    denominator = counts.total_identifications + counts.missed
    if denominator == 0:
        raise UndefinedMetric("recall undefined: no identifications and nothing to miss")
    return counts.true_positives / denominator


def precision_standard(counts: MetricCounts) -> float:
    if counts.total_identifications == 0:
        raise UndefinedMetric("precision undefined: no identifications")
    return counts.true_positives / counts.total_identifications


def recall_standard(counts: MetricCounts) -> float:
    denominator = counts.true_positives + counts.missed
    if denominator == 0:
        raise UndefinedMetric("recall undefined: no positives to find")
    return counts.true_positives / denominator


def f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        raise UndefinedMetric("f1 undefined: precision + recall is zero")
    return 2 * precision * recall / (precision + recall)


def apply_verdicts(
    outcomes: Sequence[MatchOutcome], verdicts: Sequence[FinalDecision]
) -> list[MatchOutcome]:
    """Reclassify mismatches per the final adjudication decisions.

    A valid verdict turns its mismatch into a true positive; its gold linkage
    (when present) restores coverage of the linked gold name. Verdicts whose
    (doc, name) never occurs here are ignored: they belong to other cells.
    """
    seen_keys: set[tuple[str, str]] = set()
    decisions: dict[tuple[str, str], FinalDecision] = {}
    for verdict in verdicts:
        if verdict.key in seen_keys:
            raise DuplicateVerdict(f"two verdicts for {verdict.key}")
        seen_keys.add(verdict.key)
        decisions[verdict.key] = verdict

    adjusted: list[MatchOutcome] = []
    for outcome in outcomes:
        key = (outcome.extraction.doc_id, normalize(outcome.extraction.name))
        verdict = decisions.get(key)
        if verdict is None:
            adjusted.append(outcome)
            continue
        if outcome.label is not OutcomeClass.MISMATCH:
            raise VerdictForNonMismatch(f"verdict for {key} targets a {outcome.label.value} outcome")
        if not verdict.valid:
            adjusted.append(outcome)
            continue
        adjusted.append(
            replace(
                outcome,
                label=OutcomeClass.TRUE_POSITIVE,
                matched_gold=verdict.gold_linkage,
                valid_but_unlisted=verdict.gold_linkage is None,
            )
        )
    return adjusted
