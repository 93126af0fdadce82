"""Command-line entry point: ingest | run | parse | score | serve | report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus
from .adjudication import CaseStore, create_cases
from .errors import ConfigError, MissingVerdicts, PipelineError
from .experiment import (
    ExperimentConfig,
    ResultsStore,
    cell_id,
    per_run_rows,
    report,
    rows_from_tsv,
    rows_to_tsv,
    run_matrix,
    score_cell,
    stable_mismatches,
)
from .gateway import LiveBackend, MockBackend, ModelParams, ReplayBackend, ReplayStore
from .postprocess import Extraction, parse_response, to_table
from .prompts import ContextMode, PromptConfig
from .textnorm import normalize


def load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _setting(args: argparse.Namespace, config: dict[str, str], key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _load_documents(dataset_type: str, path: str) -> list[corpus.DocumentRecord]:
    loader = corpus.load_abstracts if dataset_type == "abstract" else corpus.load_trials
    return loader(path)


def _dictionary(path: str | None) -> corpus.SynonymDictionary:
    return corpus.load_dictionary(path) if path else corpus.SynonymDictionary.default()


def _backend(name: str, replay_path: str | None):
    if name == "mock":
        return MockBackend()
    if name == "replay":
        if not replay_path:
            raise ConfigError("--replay-store is required with --backend replay")
        return ReplayBackend(ReplayStore(replay_path))
    store = ReplayStore(replay_path) if replay_path else None
    return LiveBackend(store=store)


def _shot_list(raw: str) -> list[int]:
    return [int(part) for part in str(raw).split(",") if part != ""]


def cmd_ingest(args: argparse.Namespace) -> int:
    records = _load_documents(args.dataset_type, args.input)
    print(f"loaded {len(records)} {args.dataset_type} record(s)")
    if args.gold:
        gold = corpus.load_gold(args.gold)
        print(f"loaded gold annotations for {len(gold.entries)} document(s), "
              f"{gold.total_names()} name(s)")
        check = corpus.validate_corpus(records, gold)
        print(f"gold ids missing from corpus: {list(check.missing_from_corpus) or 'none'}")
        print(f"corpus ids without gold: {len(check.unannotated)}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config_file(args.config) if args.config else {}
    dataset_type = _setting(args, config, "dataset_type", "trial")
    model = _setting(args, config, "model", "gpt-4o")
    runs = int(_setting(args, config, "runs", 2))
    cap = int(_setting(args, config, "cap", 3))
    threshold = int(_setting(args, config, "threshold", min(2, runs)))
    shots_raw = _setting(args, config, "shots", "0")
    context_raw = _setting(args, config, "context", "with")
    backend_name = _setting(args, config, "backend", "mock")
    concurrency = int(_setting(args, config, "concurrency", 1))

    params = ModelParams(
        model_name=model,
        temperature=float(_setting(args, config, "temperature", 0.0001)),
        max_tokens=int(_setting(args, config, "max_tokens", 100)),
    )
    records = _load_documents(dataset_type, args.input)
    gold = corpus.load_gold(args.gold)
    dictionary = _dictionary(args.dictionary)
    kind = corpus.DocumentKind(dataset_type)
    contexts = (
        [ContextMode.WITH, ContextMode.WITHOUT]
        if context_raw == "both"
        else [ContextMode(context_raw)]
    )
    configs = [
        ExperimentConfig(
            params=params,
            prompt=PromptConfig(kind=kind, context_mode=mode, shots=shots),
            runs=runs,
            cap=cap,
            consistency_threshold=threshold,
        )
        for mode in contexts
        for shots in _shot_list(shots_raw)
    ]
    backend = _backend(backend_name, args.replay_store)
    store = ResultsStore(args.store)
    run_matrix(configs, records, gold, dictionary, backend, store, concurrency=concurrency)
    for cfg in configs:
        print(f"cell {cell_id(cfg)}: {cfg.runs} run(s) written")
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    store = ReplayStore(args.replay_store)
    for record in store.records():
        target = record.get("target_id")
        if not target:
            continue
        result = parse_response(
            record["text"], expected_id=target, cap=args.cap, strict_tabs=args.strict_tabs
        )
        if result.error is not None:
            print(f"# {target}: {type(result.error).__name__}", file=sys.stderr)
            continue
        for warning in result.warnings:
            print(f"# {target}: {warning.value}", file=sys.stderr)
        if result.extractions:
            print(to_table(result.extractions))
    return 0


def _configs_for_store(args, config: dict[str, str]) -> list[ExperimentConfig]:
    dataset_type = _setting(args, config, "dataset_type", "trial")
    model = _setting(args, config, "model", "gpt-4o")
    runs = int(_setting(args, config, "runs", 2))
    threshold = int(_setting(args, config, "threshold", min(2, runs)))
    shots_raw = _setting(args, config, "shots", "0")
    context_raw = _setting(args, config, "context", "with")
    kind = corpus.DocumentKind(dataset_type)
    contexts = (
        [ContextMode.WITH, ContextMode.WITHOUT]
        if context_raw == "both"
        else [ContextMode(context_raw)]
    )
    return [
        ExperimentConfig(
            params=ModelParams(model_name=model),
            prompt=PromptConfig(kind=kind, context_mode=mode, shots=shots),
            runs=runs,
            mode=_setting(args, config, "mode", "literal"),
            validation=_setting(args, config, "validation", "auto"),
            consistency_threshold=threshold,
        )
        for mode in contexts
        for shots in _shot_list(shots_raw)
    ]


def cmd_score(args: argparse.Namespace) -> int:
    config = load_config_file(args.config) if args.config else {}
    gold = corpus.load_gold(args.gold)
    store = ResultsStore(args.store)
    configs = _configs_for_store(args, config)

    verdicts = None
    if any(cfg.validation == "manual" for cfg in configs):
        if not args.cases:
            raise MissingVerdicts("manual validation requires --cases (adjudication event log)")
        verdicts = CaseStore(args.cases).export_verdicts()

    canonical = []
    detailed = []
    for cfg in configs:
        canonical.append(score_cell(store, cfg, gold, verdicts))
        detailed.extend(per_run_rows(store, cfg, gold, verdicts))
    Path(args.out).write_text(rows_to_tsv(canonical), encoding="utf-8")
    if args.per_run_out:
        Path(args.per_run_out).write_text(rows_to_tsv(detailed), encoding="utf-8")
    print(f"wrote {len(canonical)} row(s) to {args.out}")
    return 0


def prepare_case_store(args: argparse.Namespace) -> CaseStore:
    """Open the case store, building cases from run-consistent mismatches if asked."""
    store = CaseStore(args.cases)
    if args.results:
        records = _load_documents(args.dataset_type, args.input)
        by_id = {r.id: r for r in records}
        gold = corpus.load_gold(args.gold)
        results = ResultsStore(args.results)
        pairs: set[tuple[str, str]] = set()
        surfaces: dict[tuple[str, str], str] = {}
        for cell in results.cells():
            pairs |= stable_mismatches(results.mismatch_sets(cell), args.threshold)
            for key, surface in results.mismatch_surfaces(cell).items():
                surfaces.setdefault(key, surface)
        known = {
            (case.extraction.doc_id, normalize(case.extraction.name))
            for case in store.cases()
        }
        fresh = [
            (Extraction(doc_id=doc_id, name=surfaces[(doc_id, name)]), by_id[doc_id],
             gold.names_for(doc_id))
            for doc_id, name in sorted(pairs)
            if doc_id in by_id and (doc_id, name) not in known
        ]
        store.add_cases(create_cases(fresh))
    return store


def cmd_serve(args: argparse.Namespace) -> int:
    store = prepare_case_store(args)
    print(f"case store holds {len(store.cases())} case(s)")
    from .service import serve

    serve(store, bind=args.bind, blind=args.blind)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    rows = rows_from_tsv(Path(args.rows).read_text(encoding="utf-8"))
    table = report(rows, fixture_check=args.fixture_check)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
        flat = Path(args.out).with_suffix(".rows.tsv")
        flat.write_text(rows_to_tsv(rows), encoding="utf-8")
    else:
        print(table, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adjuvant-ner")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="load and validate corpus files")
    ingest.add_argument("--dataset-type", choices=("abstract", "trial"), required=True)
    ingest.add_argument("--input", required=True)
    ingest.add_argument("--gold")
    ingest.set_defaults(func=cmd_ingest)

    run = sub.add_parser("run", help="run the experiment matrix")
    run.add_argument("--dataset-type", dest="dataset_type", choices=("abstract", "trial"))
    run.add_argument("--input", required=True)
    run.add_argument("--gold", required=True)
    run.add_argument("--dictionary")
    run.add_argument("--model")
    run.add_argument("--shots", help="shot count or comma list, e.g. 3 or 0,1,2,3,4")
    run.add_argument("--context", choices=("with", "without", "both"))
    run.add_argument("--runs", type=int)
    run.add_argument("--cap", type=int)
    run.add_argument("--threshold", type=int)
    run.add_argument("--backend", choices=("live", "replay", "mock"))
    run.add_argument("--replay-store", dest="replay_store")
    run.add_argument("--concurrency", type=int)
    run.add_argument("--store", required=True, help="results store directory")
    run.add_argument("--config", help="key=value configuration file")
    run.set_defaults(func=cmd_run)

    parse = sub.add_parser("parse", help="parse raw responses from a replay store")
    parse.add_argument("--replay-store", dest="replay_store", required=True)
    parse.add_argument("--cap", type=int, default=3)
    parse.add_argument("--strict-tabs", action="store_true")
    parse.set_defaults(func=cmd_parse)

    score = sub.add_parser("score", help="score a results store")
    score.add_argument("--store", required=True)
    score.add_argument("--gold", required=True)
    score.add_argument("--dataset-type", dest="dataset_type", choices=("abstract", "trial"))
    score.add_argument("--model")
    score.add_argument("--shots")
    score.add_argument("--context", choices=("with", "without", "both"))
    score.add_argument("--runs", type=int)
    score.add_argument("--threshold", type=int)
    score.add_argument("--mode", choices=("literal", "standard"))
    score.add_argument("--validation", choices=("auto", "manual"))
    score.add_argument("--cases", help="adjudication event log for manual validation")
    score.add_argument("--out", required=True)
    score.add_argument("--per-run-out", dest="per_run_out")
    score.add_argument("--config")
    score.set_defaults(func=cmd_score)

    serve = sub.add_parser("serve", help="serve the adjudication API")
    serve.add_argument("--cases", required=True, help="case event log path")
    serve.add_argument("--bind", default="127.0.0.1:8000")
    serve.add_argument("--blind", action="store_true")
    serve.add_argument("--results", help="results store to build cases from")
    serve.add_argument("--dataset-type", dest="dataset_type", choices=("abstract", "trial"))
    serve.add_argument("--input")
    serve.add_argument("--gold")
    serve.add_argument("--threshold", type=int, default=2)
    serve.set_defaults(func=cmd_serve)

    rep = sub.add_parser("report", help="format scored rows as the report table")
    rep.add_argument("--rows", required=True)
    rep.add_argument("--out")
    rep.add_argument("--fixture-check", action="store_true")
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
