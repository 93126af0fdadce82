"""Run the evaluation matrix (model x shots x context x runs) and emit reports.

Each matrix cell renders prompts for every document, dispatches them through
the gateway, parses and matches the responses, and persists per-run outcome
files under the results store directory. Scoring reads the store back; the
canonical score of a cell is run 0, with per-run rows and their mean emitted
alongside.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

from .corpus import DocumentRecord, GoldSet, SynonymDictionary
from .errors import ConfigError, MissingVerdicts, PipelineError, UndefinedMetric
from .gateway import Backend, ModelParams, run_batch
from .postprocess import Extraction, parse_response
from .prompts import PromptConfig, render_prompt, select_examples
from .scoring import (
    FinalDecision,
    MatchOutcome,
    MetricCounts,
    OutcomeClass,
    apply_verdicts,
    f1,
    match_extraction,
    normalize,
    precision_paper,
    precision_standard,
    recall_paper,
    recall_standard,
    tally,
)

MetricMode = Literal["literal", "standard"]
ValidationMode = Literal["auto", "manual"]

F1_TOLERANCE_PP = 0.05


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    params: ModelParams
    prompt: PromptConfig
    runs: int = 2
    cap: int = 3
    mode: MetricMode = "literal"
    validation: ValidationMode = "auto"
    consistency_threshold: int = 2

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 1 <= self.consistency_threshold <= self.runs:
            raise ConfigError(
                f"consistency_threshold {self.consistency_threshold} must be in 1..runs ({self.runs})"
            )
        if self.cap < 1:
            raise ConfigError("cap must be >= 1")


def cell_id(config: ExperimentConfig) -> str:
    raw = (
        f"{config.params.model_name}__{config.prompt.kind.value}"
        f"__{config.prompt.context_mode.value}__shots{config.prompt.shots}"
    )
    return re.sub(r"[^A-Za-z0-9._-]+", "-", raw)


class ResultsStore:
    """Directory of per-cell, per-run tab-separated outcome files."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _outcome_path(self, cell: str, run: int) -> Path:
        return self.root / cell / f"run{run}.tsv"

    def _error_path(self, cell: str, run: int) -> Path:
        return self.root / cell / f"run{run}_errors.tsv"

    def write_outcomes(self, cell: str, run: int, outcomes: Sequence[MatchOutcome]) -> None:
        path = self._outcome_path(cell, run)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["doc_id\tname\tlabel\tmatched_gold\tcanonical"]
        for o in outcomes:
            lines.append(
                "\t".join(
                    (
                        o.extraction.doc_id,
                        o.extraction.name,
                        o.label.value,
                        o.matched_gold or "",
                        o.canonical or "",
                    )
                )
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_errors(self, cell: str, run: int, errors: Sequence[tuple[str, str]]) -> None:
        if not errors:
            return
        path = self._error_path(cell, run)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            "\n".join(f"{doc_id}\t{message}" for doc_id, message in errors) + "\n",
            encoding="utf-8",
        )

    def read_outcomes(self, cell: str, run: int) -> list[MatchOutcome]:
        path = self._outcome_path(cell, run)
        outcomes: list[MatchOutcome] = []
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
            next(reader)
            for doc_id, name, label, matched_gold, canonical in reader:
                outcomes.append(
                    MatchOutcome(
                        extraction=Extraction(doc_id=doc_id, name=name, source_run=run),
                        label=OutcomeClass(label),
                        matched_gold=matched_gold or None,
                        canonical=canonical or None,
                    )
                )
        return outcomes

    def cells(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())

    def runs_for(self, cell: str) -> list[int]:
        cell_dir = self.root / cell
        runs = []
        for p in cell_dir.glob("run*.tsv"):
            m = re.fullmatch(r"run(\d+)\.tsv", p.name)
            if m:
                runs.append(int(m.group(1)))
        return sorted(runs)

    def mismatch_sets(self, cell: str) -> dict[int, set[tuple[str, str]]]:
        sets: dict[int, set[tuple[str, str]]] = {}
        for run in self.runs_for(cell):
            sets[run] = {
                (o.extraction.doc_id, normalize(o.extraction.name))
                for o in self.read_outcomes(cell, run)
                if o.label is OutcomeClass.MISMATCH
            }
        return sets

    def mismatch_surfaces(self, cell: str) -> dict[tuple[str, str], str]:
        """First verbatim surface form seen for each (doc, normalized name) mismatch."""
        surfaces: dict[tuple[str, str], str] = {}
        for run in self.runs_for(cell):
            for o in self.read_outcomes(cell, run):
                if o.label is OutcomeClass.MISMATCH:
                    key = (o.extraction.doc_id, normalize(o.extraction.name))
                    surfaces.setdefault(key, o.extraction.name)
        return surfaces


def run_matrix(
    configs: Iterable[ExperimentConfig],
    records: Sequence[DocumentRecord],
    gold: GoldSet,
    dictionary: SynonymDictionary,
    backend: Backend,
    store: ResultsStore,
    concurrency: int = 1,
) -> None:
    for config in configs:
        cell = cell_id(config)
        docs = [r for r in records if r.kind is config.prompt.kind]
        pool = [(r, gold.names_for(r.id)) for r in docs if gold.names_for(r.id)]
        for run in range(config.runs):
            bundles = []
            errors: list[tuple[str, str]] = []
            targets: list[DocumentRecord] = []
            for doc in docs:
                try:
                    examples = select_examples(
                        pool,
                        config.prompt.shots,
                        exclude_id=doc.id,
                        context_mode=config.prompt.context_mode,
                    )
                    bundles.append(render_prompt(doc, config.prompt, examples))
                    targets.append(doc)
                except PipelineError as exc:
                    errors.append((doc.id, f"{type(exc).__name__}: {exc}"))

            outcomes: list[MatchOutcome] = []
            for item in run_batch(bundles, config.params, backend, concurrency):
                if item.error is not None:
                    errors.append((item.target_id, f"{type(item.error).__name__}: {item.error}"))
                    continue
                assert item.response is not None
                parsed = parse_response(
                    item.response.text, expected_id=item.target_id, cap=config.cap, run=run
                )
                if parsed.error is not None:
                    errors.append((item.target_id, f"{type(parsed.error).__name__}: {parsed.error}"))
                    continue
                for extraction in parsed.extractions:
                    outcomes.append(match_extraction(extraction, gold, dictionary))

            store.write_outcomes(cell, run, outcomes)
            store.write_errors(cell, run, errors)


def stable_mismatches(
    run_sets: Mapping[int, Iterable[tuple[str, str]]] | Sequence[Iterable[tuple[str, str]]],
    threshold: int,
) -> set[tuple[str, str]]:
    """Pairs occurring in at least ``threshold`` distinct runs."""
    if threshold < 1:
        raise ConfigError("threshold must be >= 1")
    iterables = run_sets.values() if isinstance(run_sets, Mapping) else run_sets
    counts: Counter[tuple[str, str]] = Counter()
    for one_run in iterables:
        for pair in set(one_run):
            counts[pair] += 1
    return {pair for pair, seen in counts.items() if seen >= threshold}


@dataclass(frozen=True, slots=True)
class MetricsRow:
    model: str
    kind: str
    context: str
    shots: int
    validation: str
    precision: float | None
    recall: float | None
    f1: float | None
    counts: MetricCounts | None
    run: str = "0"


def _pct(value: float | None) -> float | None:
    if value is None:
        return None
    return float(Decimal(repr(value * 100)).quantize(Decimal("0.01"), ROUND_HALF_UP))


def _metrics(counts: MetricCounts, mode: MetricMode) -> tuple[float | None, float | None, float | None]:
    precision_of = precision_paper if mode == "literal" else precision_standard
    recall_of = recall_paper if mode == "literal" else recall_standard
    try:
        p = precision_of(counts)
    except UndefinedMetric:
        p = None
    try:
        r = recall_of(counts)
    except UndefinedMetric:
        r = None
    score = None
    if p is not None and r is not None:
        try:
            score = f1(p, r)
        except UndefinedMetric:
            score = None
    return p, r, score


def score_outcomes(
    outcomes: Sequence[MatchOutcome],
    gold: GoldSet,
    config: ExperimentConfig,
    verdicts: Sequence[FinalDecision] | None = None,
    run: str = "0",
) -> MetricsRow:
    if config.validation == "manual":
        if verdicts is None:
            raise MissingVerdicts("manual validation requires exported verdicts")
        outcomes = apply_verdicts(outcomes, verdicts)
    counts = tally(outcomes, gold)
    p, r, score = _metrics(counts, config.mode)
    return MetricsRow(
        model=config.params.model_name,
        kind=config.prompt.kind.value,
        context=config.prompt.context_mode.value,
        shots=config.prompt.shots,
        validation=config.validation,
        precision=_pct(p),
        recall=_pct(r),
        f1=_pct(score),
        counts=counts,
        run=run,
    )


def score_cell(
    store: ResultsStore,
    config: ExperimentConfig,
    gold: GoldSet,
    verdicts: Sequence[FinalDecision] | None = None,
) -> MetricsRow:
    """Canonical score of a cell: outcomes of run 0."""
    outcomes = store.read_outcomes(cell_id(config), 0)
    return score_outcomes(outcomes, gold, config, verdicts)


def per_run_rows(
    store: ResultsStore,
    config: ExperimentConfig,
    gold: GoldSet,
    verdicts: Sequence[FinalDecision] | None = None,
) -> list[MetricsRow]:
    """One row per run plus a 'mean' row averaging the defined percentages."""
    cell = cell_id(config)
    rows = [
        score_outcomes(store.read_outcomes(cell, run), gold, config, verdicts, run=str(run))
        for run in store.runs_for(cell)
    ]

    def mean_of(values: list[float | None]) -> float | None:
        if not values or any(v is None for v in values):
            return None
        return float(
            (sum(Decimal(repr(v)) for v in values) / len(values)).quantize(
                Decimal("0.01"), ROUND_HALF_UP
            )
        )

    rows.append(
        MetricsRow(
            model=config.params.model_name,
            kind=config.prompt.kind.value,
            context=config.prompt.context_mode.value,
            shots=config.prompt.shots,
            validation=config.validation,
            precision=mean_of([r.precision for r in rows]),
            recall=mean_of([r.recall for r in rows]),
            f1=mean_of([r.f1 for r in rows]),
            counts=None,
            run="mean",
        )
    )
    return rows


ROW_COLUMNS = (
    "model",
    "kind",
    "context",
    "shots",
    "validation",
    "run",
    "precision",
    "recall",
    "f1",
    "total",
    "true_positives",
    "nonspecific",
    "mismatches",
    "missed",
)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def rows_to_tsv(rows: Sequence[MetricsRow]) -> str:
    lines = ["\t".join(ROW_COLUMNS)]
    for row in rows:
        counts = row.counts
        lines.append(
            "\t".join(
                (
                    row.model,
                    row.kind,
                    row.context,
                    str(row.shots),
                    row.validation,
                    row.run,
                    _fmt(row.precision),
                    _fmt(row.recall),
                    _fmt(row.f1),
                    "" if counts is None else str(counts.total_identifications),
                    "" if counts is None else str(counts.true_positives),
                    "" if counts is None else str(counts.nonspecific),
                    "" if counts is None else str(counts.mismatches),
                    "" if counts is None else str(counts.missed),
                )
            )
        )
    return "\n".join(lines) + "\n"


def rows_from_tsv(text: str) -> list[MetricsRow]:
    rows: list[MetricsRow] = []
    lines = text.splitlines()
    header = lines[0].split("\t")
    if tuple(header) != ROW_COLUMNS:
        raise ConfigError(f"unexpected rows header: {header}")
    for line in lines[1:]:
        if not line.strip():
            continue
        cells = line.split("\t")
        record = dict(zip(ROW_COLUMNS, cells))
        counts = None
        if record["total"]:
            counts = MetricCounts(
                total_identifications=int(record["total"]),
                true_positives=int(record["true_positives"]),
                nonspecific=int(record["nonspecific"]),
                mismatches=int(record["mismatches"]),
                missed=int(record["missed"]),
            )
        rows.append(
            MetricsRow(
                model=record["model"],
                kind=record["kind"],
                context=record["context"],
                shots=int(record["shots"]),
                validation=record["validation"],
                precision=float(record["precision"]) if record["precision"] else None,
                recall=float(record["recall"]) if record["recall"] else None,
                f1=float(record["f1"]) if record["f1"] else None,
                counts=counts,
                run=record["run"],
            )
        )
    return rows


def f1_consistent(row: MetricsRow, tolerance_pp: float = F1_TOLERANCE_PP) -> bool:
    """Check the serialized F1 against the harmonic mean of the serialized P and R."""
    if row.precision is None or row.recall is None or row.f1 is None:
        return True
    recomputed = f1(row.precision / 100, row.recall / 100) * 100
    return abs(recomputed - row.f1) <= tolerance_pp


@dataclass(frozen=True, slots=True)
class FixtureFlag:
    table: str
    model: str
    context: str
    shots: int
    validation: str
    published_f1: float
    recomputed_f1: float


def load_published_rows() -> list[dict]:
    text = (
        resources.files("adjuvant_ner.data")
        .joinpath("published_results.tsv")
        .read_text(encoding="utf-8")
    )
    reader = csv.DictReader(text.splitlines(), delimiter="\t")
    return [dict(row) for row in reader]


def published_fixture_check(tolerance_pp: float = F1_TOLERANCE_PP) -> list[FixtureFlag]:
    """Recompute F1 over the transcribed published tables; return the off cells."""
    flags = []
    for row in load_published_rows():
        p, r, published = float(row["precision"]), float(row["recall"]), float(row["f1"])
        recomputed = f1(p, r)
        if abs(recomputed - published) > tolerance_pp:
            flags.append(
                FixtureFlag(
                    table=row["table"],
                    model=row["model"],
                    context=row["context"],
                    shots=int(row["shots"]),
                    validation=row["validation"],
                    published_f1=published,
                    recomputed_f1=float(
                        Decimal(repr(recomputed)).quantize(Decimal("0.01"), ROUND_HALF_UP)
                    ),
                )
            )
    return flags


def report(rows: Sequence[MetricsRow], fixture_check: bool = False) -> str:
    """Tab-separated table grouped by model-and-context block, ordered by shots."""
    modes = [m for m in ("auto", "manual") if any(r.validation == m for r in rows)]
    if not modes:
        modes = ["auto"]
    header = ["Shots"]
    for mode in modes:
        header += [f"P[{mode}]", f"R[{mode}]", f"F1[{mode}]"]
    lines = ["\t".join(header)]

    blocks: dict[tuple[str, str, str], dict[int, dict[str, MetricsRow]]] = {}
    for row in rows:
        if row.run != "0":
            continue
        block = blocks.setdefault((row.model, row.kind, row.context), {})
        block.setdefault(row.shots, {})[row.validation] = row

    for (model, kind, context), by_shots in sorted(blocks.items()):
        lines.append(f"# {model} | {kind} | {context} context")
        for shots in sorted(by_shots):
            cells = [str(shots)]
            for mode in modes:
                row = by_shots[shots].get(mode)
                if row is None:
                    cells += ["", "", ""]
                else:
                    cells += [_fmt(row.precision), _fmt(row.recall), _fmt(row.f1)]
            lines.append("\t".join(cells))

    if fixture_check:
        flags = published_fixture_check()
        lines.append(f"# f1-check: {len(flags)} inconsistent published cell(s)")
        for flag in flags:
            lines.append(
                f"# f1-check: {flag.table} {flag.model} {flag.context} "
                f"shots={flag.shots} {flag.validation} published_f1={flag.published_f1:.2f} "
                f"recomputed={flag.recomputed_f1:.2f}"
            )
    return "\n".join(lines) + "\n"
