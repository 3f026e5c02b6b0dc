"""Command line driver.

Subcommands:
    run     execute the full pipeline from a JSON config file
    mine    run only the mining stage on six externally supplied matrix files
    report  print human-readable summaries from a finished output directory

Exit codes: 0 success, 1 usage or configuration problem, 2 data error,
3 training divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .emotions import emotion_name
from .errors import (
    ConfigurationError,
    CorpusFormatError,
    DataError,
    EmocorrError,
    TrainingDivergedError,
)
from .pipeline import (
    StageFailure,
    load_config,
    mine_matrix_files,
    run_pipeline,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from calling sys.exit(2)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="emocorr",
                     description="Train the classifiers and mine emotion "
                                 "confusion and evolution laws.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full pipeline from a config file")
    run.add_argument("--config", required=True, help="JSON pipeline config")
    run.add_argument("--seed", type=int, default=None, help="override config seed")
    run.add_argument("--out", default=None, help="override output directory")
    run.add_argument("--quorum", type=int, default=None)
    run.add_argument("--trace-len", type=int, default=None, dest="trace_length")
    run.add_argument("--variance-threshold", type=float, default=None)

    mine = sub.add_parser("mine", help="mine laws from 6 matrix files")
    mine.add_argument("matrices", nargs="+", help="exactly six matrix files")
    mine.add_argument("--out", required=True, help="output directory for reports")
    mine.add_argument("--dataset-name", default="dataset")
    mine.add_argument("--quorum", type=int, default=2)
    mine.add_argument("--trace-len", type=int, default=8, dest="trace_length")
    mine.add_argument("--variance-threshold", type=float, default=0.85)

    report = sub.add_parser("report", help="print summaries from an output dir")
    report.add_argument("--out", required=True, help="pipeline output directory")
    return parser


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, TrainingDivergedError):
        return EXIT_DIVERGED
    if isinstance(exc, (CorpusFormatError, DataError, OSError)):
        return EXIT_DATA
    return EXIT_USAGE  # ConfigurationError and anything usage-shaped


def _cmd_run(args) -> int:
    overrides = {
        "seed": args.seed,
        "out_dir": args.out,
        "quorum": args.quorum,
        "trace_length": args.trace_length,
        "variance_threshold": args.variance_threshold,
    }
    config = load_config(args.config, overrides)
    run_pipeline(config)
    print(f"artifacts written to {config.out_dir}")
    return EXIT_OK


def _cmd_mine(args) -> int:
    written = mine_matrix_files(
        args.matrices, args.out, dataset=args.dataset_name,
        variance_threshold=args.variance_threshold, quorum=args.quorum,
        trace_length=args.trace_length)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_report(args) -> int:
    out_dir = Path(args.out)
    if not out_dir.is_dir():
        raise DataError(f"not a directory: {out_dir}")
    found = False
    for summary_path in sorted(out_dir.glob("*/summary.json")):
        found = True
        summary = json.loads(summary_path.read_text())
        name = summary["dataset"]
        print(f"== {name}: {summary['records']} records "
              f"({summary['discarded']} discarded), "
              f"{summary['train_size']} train / {summary['test_size']} test")
        views = sorted({tag.rsplit('_', 1)[0] for tag in summary["accuracy"]})
        models = sorted({tag.rsplit('_', 1)[1] for tag in summary["accuracy"]})
        print("model     " + "".join(f"{v:>11}" for v in views))
        for model in models:
            cells = "".join(
                f"{summary['accuracy'].get(f'{v}_{model}', float('nan')):>11.3f}"
                for v in views)
            print(f"{model:<10}{cells}")
        _print_reports(summary_path.parent / "reports", name)
    for reports_dir in sorted(out_dir.glob("reports")):
        found = True  # mine-only layout: reports directly under out dir
        _print_reports(reports_dir, None)
    if not found:
        raise DataError(f"no summary.json or reports under {out_dir}")
    return EXIT_OK


def _print_reports(reports_dir: Path, name) -> None:
    confusion_path = reports_dir / "confusion_law.json"
    evolution_path = reports_dir / "evolution.json"
    if confusion_path.is_file():
        law = json.loads(confusion_path.read_text())
        ranking = ", ".join(emotion_name(i) for i in law["ranking"])
        print(f"absolute confusion ranking (most confusable first): {ranking}")
        kept = [c for c in law["law_columns"] if c["kept"]]
        for col in kept:
            print(f"  {col['relation']}-confusion partner of {col['center_name']}: "
                  f"{col['partner_name']} (entropy {col['entropy']:.3f})")
    if evolution_path.is_file():
        evo = json.loads(evolution_path.read_text())
        for pair in evo["misjudgment_pairs"]:
            print(f"  misjudgment {pair['source_name']} -> {pair['target_name']}: "
                  f"{pair['endorser_count']} endorsers, "
                  f"mean prob {pair['mean_prob']:.3f}")
        cycles = set()
        for rec in evo["traces"]:
            for cycle in rec["cycles"] or []:
                cycles.add(tuple(cycle))
        if cycles:
            shown = "; ".join(
                "-".join(emotion_name(i) for i in c) for c in sorted(cycles))
            print(f"  circulations seen in traces: {shown}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "mine":
            return _cmd_mine(args)
        return _cmd_report(args)
    except StageFailure as failure:
        print(f"error in {failure.stage}: {failure.cause}", file=sys.stderr)
        return _exit_code_for(failure.cause)
    except EmocorrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
