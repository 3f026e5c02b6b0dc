"""End-to-end orchestration: ingest, train all six view-model combinations,
mine both laws, and write plot-ready artifacts.

Artifact layout under the output directory::

    <dataset>/split.tsv                       corpus with train|test column
    <dataset>/matrices/<view>_<model>.tsv     row-stochastic matrices
    <dataset>/checkpoints/<view>_<model>.npz  trained parameters
    <dataset>/reports/confusion_law.{json,tsv}
    <dataset>/reports/absolute_scores.tsv
    <dataset>/reports/evolution.{json,tsv}
    <dataset>/reports/misjudgment.tsv
    <dataset>/summary.json
    manifest.json                             config hash, seed, file digests

Every file is deterministic for a fixed config and seed: floats serialize via
repr (shortest round trip), JSON keys are sorted, and checkpoints carry
pinned timestamps. Matrix files therefore reload bit-exactly, which is what
lets mining re-run on written matrices reproduce the original reports.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .confusion import (
    CorrelationMatrix,
    PerspectiveSet,
    assemble_perspectives,
    mine_confusion,
    row_normalize,
)
from .corpus import (
    SourceKind,
    build_vocab,
    label_records,
    parse_corpus,
    split_train_test,
    write_split_corpus,
)
from .emotions import EMOTIONS, NUM_EMOTIONS, emotion_name
from .errors import (
    ConfigurationError,
    CorpusFormatError,
    DataError,
    EmocorrError,
)
from .evolution import (
    TraceCondition,
    best_trace,
    detect_circulations,
    misjudgment_law,
    shortest_path,
)
from .features import (
    FeatureView,
    extract_tokens,
    load_synonym_lexicon,
    pad_and_mask,
    whitespace_tokenizer,
)
from .nn import (
    ModelVariant,
    TrainConfig,
    evaluate_confusion_counts,
    save_checkpoint,
    train,
)

VIEWS = (FeatureView.CHARACTER, FeatureView.IMPLICIT, FeatureView.EXPLICIT)
VARIANTS = (ModelVariant.M1, ModelVariant.M2)


class StageFailure(EmocorrError):
    """Wraps any error with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    path: Path
    source_kind: SourceKind
    pad_length: int


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    out_dir: Path
    lexicon_path: Path
    datasets: tuple
    train_configs: dict  # {"m1": TrainConfig, "m2": TrainConfig}
    test_fraction: float = 0.2
    min_total_votes: int = 200
    min_vote_ratio: float = 0.5
    variance_threshold: float = 0.85
    quorum: int = 2
    trace_length: int = 8

    def validate(self) -> None:
        if not self.datasets:
            raise ConfigurationError("config lists no datasets")
        if not Path(self.lexicon_path).is_file():
            raise ConfigurationError(f"lexicon file not found: {self.lexicon_path}")
        for spec in self.datasets:
            if not Path(spec.path).is_file():
                raise ConfigurationError(f"corpus file not found: {spec.path}")
            if spec.pad_length < 1:
                raise ConfigurationError(f"dataset {spec.name}: pad_length must be >= 1")
        names = [spec.name for spec in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigurationError("dataset names must be unique")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigurationError("test_fraction must lie strictly between 0 and 1")
        if not 0.0 < self.variance_threshold <= 1.0:
            raise ConfigurationError("variance_threshold must lie in (0, 1]")
        if self.quorum < 1:
            raise ConfigurationError("quorum must be at least 1")
        if not 1 <= self.trace_length <= 8:
            raise ConfigurationError("trace_length must lie in [1, 8]")
        if self.min_total_votes < 0 or not 0.0 <= self.min_vote_ratio < 1.0:
            raise ConfigurationError("vote filter thresholds out of range")
        for key in ("m1", "m2"):
            if key not in self.train_configs:
                raise ConfigurationError(f"missing train config for {key}")
            self.train_configs[key].validate()

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "out_dir": str(self.out_dir),
            "lexicon_path": str(self.lexicon_path),
            "test_fraction": self.test_fraction,
            "min_total_votes": self.min_total_votes,
            "min_vote_ratio": self.min_vote_ratio,
            "variance_threshold": self.variance_threshold,
            "quorum": self.quorum,
            "trace_length": self.trace_length,
            "datasets": [
                {
                    "name": spec.name,
                    "path": str(spec.path),
                    "source_kind": spec.source_kind.value,
                    "pad_length": spec.pad_length,
                }
                for spec in self.datasets
            ],
            "train": {
                key: dataclasses.asdict(tc) for key, tc in sorted(self.train_configs.items())
            },
        }


def config_from_dict(data: dict, overrides: Optional[dict] = None) -> PipelineConfig:
    """Build a validated PipelineConfig from parsed JSON plus CLI overrides."""
    data = dict(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        datasets = tuple(
            DatasetSpec(
                name=ds["name"],
                path=Path(ds["path"]),
                source_kind=SourceKind(ds["source_kind"]),
                pad_length=int(ds["pad_length"]),
            )
            for ds in data["datasets"]
        )
        train_configs = {
            key: TrainConfig(**cfg) for key, cfg in data["train"].items()
        }
        config = PipelineConfig(
            seed=int(data["seed"]),
            out_dir=Path(data["out_dir"]),
            lexicon_path=Path(data["lexicon_path"]),
            datasets=datasets,
            train_configs=train_configs,
            test_fraction=float(data.get("test_fraction", 0.2)),
            min_total_votes=int(data.get("min_total_votes", 200)),
            min_vote_ratio=float(data.get("min_vote_ratio", 0.5)),
            variance_threshold=float(data.get("variance_threshold", 0.85)),
            quorum=int(data.get("quorum", 2)),
            trace_length=int(data.get("trace_length", 8)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad config: {exc}") from exc
    config.validate()
    return config


def load_config(path, overrides: Optional[dict] = None) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data, overrides)


# --- matrix files -----------------------------------------------------------

def write_matrix_file(matrix: CorrelationMatrix, path) -> None:
    """6x6 decimal grid, tab separated, full round-trip precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# feature={matrix.feature}\tmodel={matrix.model}\n")
        for row in matrix.values:
            fh.write("\t".join(repr(float(v)) for v in row) + "\n")


def read_matrix_file(path, row_sum_tol: float = 1e-6) -> CorrelationMatrix:
    """Parse and validate a matrix file.

    Row sums are checked against ``row_sum_tol`` (error names the first bad
    row). Rows further than 1e-12 from 1 are renormalized; matrices written
    by this package are already exact, so their values pass through
    untouched and reload bit-exactly.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise CorpusFormatError(f"{path}: missing '# feature=... model=...' header")
    header = lines[0][1:].strip()
    fields = dict(
        part.split("=", 1) for part in header.split() if "=" in part
    )
    if "feature" not in fields or "model" not in fields:
        raise CorpusFormatError(f"{path}: header must carry feature= and model= tags")
    if len(lines) != 1 + NUM_EMOTIONS:
        raise CorpusFormatError(
            f"{path}: expected {NUM_EMOTIONS} matrix rows, got {len(lines) - 1}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != NUM_EMOTIONS:
            raise CorpusFormatError(f"{path} line {lineno}: expected 6 values")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise CorpusFormatError(f"{path} line {lineno}: non-numeric value") from None
    values = np.asarray(rows, dtype=float)
    if (values < 0).any():
        raise DataError(f"{path}: negative probability entry")
    sums = values.sum(axis=1)
    for idx in range(NUM_EMOTIONS):
        if abs(sums[idx] - 1.0) > row_sum_tol:
            raise DataError(
                f"{path}: row {idx} ({emotion_name(idx)}) sums to {sums[idx]!r}, "
                "not a probability row"
            )
        if abs(sums[idx] - 1.0) > 1e-12:
            values[idx] /= sums[idx]
    return CorrelationMatrix(values=values, feature=fields["feature"],
                             model=fields["model"])


# --- report construction ----------------------------------------------------

def _confusion_report(dataset: str, perspectives: PerspectiveSet,
                      variance_threshold: float) -> dict:
    features, analyses, law = mine_confusion(perspectives, variance_threshold)
    return {
        "dataset": dataset,
        "emotions": list(EMOTIONS),
        "variance_threshold": variance_threshold,
        "perspectives": list(perspectives.tags),
        "retained_components": {
            tag: int(count)
            for tag, count in zip(perspectives.tags, features.retained)
        },
        "feature_matrix": [[float(v) for v in row] for row in features.rows],
        "absolute_scores": [float(s) for s in law.absolute_scores],
        "ranking": [int(i) for i in law.ranking],
        "entropy_mean": float(law.entropy_mean),
        "sequence_matrices": {
            emotion_name(a.center): [[int(v) for v in row] for row in a.sequence]
            for a in analyses
        },
        "column_entropies": {
            emotion_name(a.center): [float(h) for h in a.column_entropies]
            for a in analyses
        },
        "law_columns": [
            {
                "center": col.center,
                "center_name": emotion_name(col.center),
                "relation": col.relation,
                "partner": col.partner,
                "partner_name": emotion_name(col.partner),
                "entropy": float(col.entropy),
                "kept": col.kept,
                "tie": col.tie,
            }
            for col in law.columns
        ],
    }


def _trace_record(perspective: str, condition: str, initial, ultimate,
                  builder) -> dict:
    record = {
        "perspective": perspective,
        "condition": condition,
        "initial": initial,
        "ultimate": ultimate,
        "path": None,
        "step_probs": None,
        "log_prob": None,
        "cycles": None,
        "error": None,
    }
    try:
        trace = builder()
    except EmocorrError as exc:
        record["error"] = str(exc)
        return record
    record["path"] = [int(p) for p in trace.path]
    record["step_probs"] = [float(p) for p in trace.step_probs]
    record["log_prob"] = float(trace.log_prob)
    record["cycles"] = [list(c) for c in detect_circulations(trace)]
    return record


def _evolution_report(dataset: str, perspectives: PerspectiveSet,
                      quorum: int, trace_length: int) -> dict:
    pairs = misjudgment_law(perspectives.matrices, quorum=quorum)
    traces = []
    shortest = []
    for matrix in perspectives.perspectives:
        values, tag = matrix.values, matrix.tag
        for start in range(NUM_EMOTIONS):
            traces.append(_trace_record(
                tag, TraceCondition.GIVEN_INITIAL.value, start, None,
                lambda v=values, s=start: best_trace(
                    v, trace_length, TraceCondition.GIVEN_INITIAL, initial=s)))
        for end in range(NUM_EMOTIONS):
            traces.append(_trace_record(
                tag, TraceCondition.GIVEN_ULTIMATE.value, None, end,
                lambda v=values, e=end: best_trace(
                    v, trace_length, TraceCondition.GIVEN_ULTIMATE, ultimate=e)))
        for start in range(NUM_EMOTIONS):
            for end in range(NUM_EMOTIONS):
                if start == end:
                    continue
                traces.append(_trace_record(
                    tag, TraceCondition.GIVEN_BOTH.value, start, end,
                    lambda v=values, s=start, e=end: best_trace(
                        v, trace_length, TraceCondition.GIVEN_BOTH,
                        initial=s, ultimate=e)))
        for start in range(NUM_EMOTIONS):
            for end in range(NUM_EMOTIONS):
                if start == end:
                    continue
                shortest.append(_trace_record(
                    tag, "shortest", start, end,
                    lambda v=values, s=start, e=end: shortest_path(v, s, e)))
    return {
        "dataset": dataset,
        "quorum": quorum,
        "trace_length": trace_length,
        "misjudgment_pairs": [
            {
                "source": p.source,
                "source_name": emotion_name(p.source),
                "target": p.target,
                "target_name": emotion_name(p.target),
                "endorsers": list(p.endorsers),
                "endorser_count": len(p.endorsers),
                "mean_prob": float(p.mean_prob),
            }
            for p in pairs
        ],
        "traces": traces,
        "shortest_paths": shortest,
    }


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _fmt_path(path) -> str:
    return "->".join(str(p) for p in path) if path else ""


def _fmt_cycles(cycles) -> str:
    return ";".join("-".join(str(p) for p in c) for c in cycles) if cycles else ""


def _write_confusion_tsv(report: dict, law_path, scores_path) -> None:
    with open(law_path, "w", encoding="utf-8") as fh:
        fh.write("dataset\tcenter\trelation\tpartner\tentropy\tkept\n")
        for col in report["law_columns"]:
            fh.write(
                f"{report['dataset']}\t{col['center_name']}\t{col['relation']}\t"
                f"{col['partner_name']}\t{repr(col['entropy'])}\t"
                f"{int(col['kept'])}\n"
            )
    with open(scores_path, "w", encoding="utf-8") as fh:
        fh.write("dataset\temotion\tabsolute_score\n")
        for idx, score in enumerate(report["absolute_scores"]):
            fh.write(f"{report['dataset']}\t{emotion_name(idx)}\t{repr(score)}\n")


def _write_evolution_tsv(report: dict, trace_path, pairs_path) -> None:
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write(
            "dataset\tperspective\tcondition\tpath\tstep_probs\tlog_prob\tcycles\terror\n"
        )
        for rec in report["traces"] + report["shortest_paths"]:
            probs = ",".join(repr(p) for p in rec["step_probs"] or [])
            log_prob = "" if rec["log_prob"] is None else repr(rec["log_prob"])
            fh.write(
                f"{report['dataset']}\t{rec['perspective']}\t{rec['condition']}\t"
                f"{_fmt_path(rec['path'])}\t{probs}\t{log_prob}\t"
                f"{_fmt_cycles(rec['cycles'])}\t{rec['error'] or ''}\n"
            )
    with open(pairs_path, "w", encoding="utf-8") as fh:
        fh.write("dataset\tsource\ttarget\tendorser_count\tendorsers\tmean_prob\n")
        for p in report["misjudgment_pairs"]:
            fh.write(
                f"{report['dataset']}\t{p['source_name']}\t{p['target_name']}\t"
                f"{p['endorser_count']}\t{','.join(p['endorsers'])}\t"
                f"{repr(p['mean_prob'])}\n"
            )


def write_mining_reports(dataset: str, perspectives: PerspectiveSet,
                         variance_threshold: float, quorum: int,
                         trace_length: int, reports_dir) -> list:
    """Mine both laws and write the four report files; returns written paths."""
    reports_dir = Path(reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    confusion = _confusion_report(dataset, perspectives, variance_threshold)
    evolution = _evolution_report(dataset, perspectives, quorum, trace_length)
    written = []
    for name, obj in (("confusion_law.json", confusion), ("evolution.json", evolution)):
        path = reports_dir / name
        _write_json(obj, path)
        written.append(path)
    _write_confusion_tsv(confusion, reports_dir / "confusion_law.tsv",
                         reports_dir / "absolute_scores.tsv")
    written += [reports_dir / "confusion_law.tsv", reports_dir / "absolute_scores.tsv"]
    _write_evolution_tsv(evolution, reports_dir / "evolution.tsv",
                         reports_dir / "misjudgment.tsv")
    written += [reports_dir / "evolution.tsv", reports_dir / "misjudgment.tsv"]
    return written


# --- the run pipeline -------------------------------------------------------

def _encode(records, view, lexicon, vocab, pad_length):
    sequences = [
        pad_and_mask(
            extract_tokens(rec.body, view, whitespace_tokenizer, lexicon),
            vocab, pad_length)
        for rec in records
    ]
    ids = np.array([s.token_ids for s in sequences], dtype=np.int64)
    mask = np.array([s.mask for s in sequences], dtype=float)
    labels = np.array([rec.label for rec in records], dtype=np.int64)
    return ids, mask, labels


def _train_seed(config: PipelineConfig, base: int, ds_idx: int, view_idx: int,
                variant_idx: int) -> int:
    seq = np.random.SeedSequence([config.seed, base, ds_idx, view_idx, variant_idx])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunSummary:
    out_dir: Path
    datasets: dict  # name -> per-dataset summary dict
    manifest_path: Path


def _stage(stage_name: str, fn):
    try:
        return fn()
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(stage_name, exc) from exc


def run_pipeline(config: PipelineConfig, log=print) -> RunSummary:
    """Execute the whole pipeline; on stage failure the manifest still lands.

    Raises StageFailure with the failed stage name; any artifacts written
    before the failure stay on disk and appear in the manifest.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list = []
    summaries: dict = {}
    failed_stage = None
    try:
        _stage("config", config.validate)
        lexicon = _stage("lexicon", lambda: load_synonym_lexicon(config.lexicon_path))
        for ds_idx, spec in enumerate(config.datasets):
            summaries[spec.name] = _run_dataset(
                config, spec, ds_idx, lexicon, out_dir, artifacts, log)
    except StageFailure as failure:
        failed_stage = failure.stage
        _write_manifest(config, out_dir, artifacts, failed_stage)
        raise
    manifest_path = _write_manifest(config, out_dir, artifacts, None)
    return RunSummary(out_dir=out_dir, datasets=summaries, manifest_path=manifest_path)


def _run_dataset(config, spec, ds_idx, lexicon, out_dir, artifacts, log):
    name = spec.name
    ds_dir = out_dir / name
    (ds_dir / "matrices").mkdir(parents=True, exist_ok=True)
    (ds_dir / "checkpoints").mkdir(parents=True, exist_ok=True)

    records = _stage(f"corpus:{name}",
                     lambda: parse_corpus(spec.path, spec.source_kind))
    labeling = _stage(f"label:{name}", lambda: label_records(
        records, min_total=config.min_total_votes, min_ratio=config.min_vote_ratio))
    train_set, test_set = _stage(f"split:{name}", lambda: split_train_test(
        labeling.labeled, config.test_fraction, config.seed))
    log(f"[{name}] {len(records)} records, {labeling.discarded} discarded by the "
        f"vote filter, {len(train_set)} train / {len(test_set)} test")

    split_path = ds_dir / "split.tsv"
    split_by_id = {rec.id: rec.split for rec in (*train_set, *test_set)}
    _stage(f"split:{name}", lambda: write_split_corpus(records, split_by_id, split_path))
    artifacts.append(split_path)

    accuracies: dict = {}
    vocab_sizes: dict = {}
    matrices = []
    for view_idx, view in enumerate(VIEWS):
        lex = lexicon if view is FeatureView.IMPLICIT else None
        vocab = _stage(f"vocab:{name}:{view.value}", lambda v=view, l=lex: build_vocab(
            train_set, v, whitespace_tokenizer, l))
        vocab_sizes[view.value] = vocab.size
        train_ids, train_mask, train_labels = _encode(
            train_set, view, lex, vocab, spec.pad_length)
        test_ids, test_mask, test_labels = _encode(
            test_set, view, lex, vocab, spec.pad_length)
        for variant_idx, variant in enumerate(VARIANTS):
            tag = f"{view.value}_{variant.value}"
            stage_name = f"train:{name}:{tag}"
            base_tc = config.train_configs[variant.value]
            tc = dataclasses.replace(
                base_tc,
                seed=_train_seed(config, base_tc.seed, ds_idx, view_idx, variant_idx))
            result = _stage(stage_name, lambda t=tc, v=variant: train(
                train_ids, train_mask, train_labels, vocab.size, t, v))
            evaluation = _stage(stage_name, lambda p=result.params: evaluate_confusion_counts(
                p, test_ids, test_mask, test_labels))
            matrix = _stage(stage_name, lambda e=evaluation, vw=view, va=variant: row_normalize(
                e.counts, vw.value, va.value))
            accuracies[tag] = evaluation.accuracy
            matrices.append(matrix)
            ckpt_path = ds_dir / "checkpoints" / f"{tag}.npz"
            _stage(stage_name, lambda p=result.params, pp=ckpt_path: save_checkpoint(p, pp))
            artifacts.append(ckpt_path)
            matrix_path = ds_dir / "matrices" / f"{tag}.tsv"
            _stage(stage_name, lambda m=matrix, pp=matrix_path: write_matrix_file(m, pp))
            artifacts.append(matrix_path)
            log(f"[{name}] {tag}: accuracy {evaluation.accuracy:.3f}")

    perspectives = _stage(f"mine:{name}", lambda: assemble_perspectives(matrices))
    report_paths = _stage(f"mine:{name}", lambda: write_mining_reports(
        name, perspectives, config.variance_threshold, config.quorum,
        config.trace_length, ds_dir / "reports"))
    artifacts.extend(report_paths)

    summary = {
        "dataset": name,
        "records": len(records),
        "discarded": labeling.discarded,
        "train_size": len(train_set),
        "test_size": len(test_set),
        "vocab_sizes": vocab_sizes,
        "accuracy": {tag: float(acc) for tag, acc in sorted(accuracies.items())},
    }
    summary_path = ds_dir / "summary.json"
    _write_json(summary, summary_path)
    artifacts.append(summary_path)
    log(format_accuracy_table(name, accuracies))
    return summary


def format_accuracy_table(name: str, accuracies: dict) -> str:
    """Accuracy per model (rows) and feature view (columns)."""
    header = f"[{name}] accuracy"
    lines = [header, "model     " + "".join(f"{v.value:>11}" for v in VIEWS)]
    for variant in VARIANTS:
        cells = "".join(
            f"{accuracies.get(f'{v.value}_{variant.value}', float('nan')):>11.3f}"
            for v in VIEWS
        )
        lines.append(f"{variant.value:<10}{cells}")
    return "\n".join(lines)


def _write_manifest(config, out_dir: Path, artifacts, failed_stage) -> Path:
    hashed = config.to_dict()
    hashed.pop("out_dir")  # artifact placement is not part of the semantics
    config_bytes = json.dumps(hashed, sort_keys=True).encode()
    manifest = {
        "config_sha256": hashlib.sha256(config_bytes).hexdigest(),
        "seed": config.seed,
        "failed_stage": failed_stage,
        "artifacts": {
            str(Path(p).relative_to(out_dir)): _sha256(p)
            for p in sorted(artifacts, key=lambda p: str(p))
        },
    }
    path = out_dir / "manifest.json"
    _write_json(manifest, path)
    return path


def mine_matrix_files(paths: Sequence, out_dir, dataset: str = "dataset",
                      variance_threshold: float = 0.85, quorum: int = 2,
                      trace_length: int = 8) -> list:
    """Mining-only entry point over externally supplied matrix files."""
    if len(paths) != 6:
        raise ConfigurationError(f"expected exactly 6 matrix files, got {len(paths)}")
    matrices = [read_matrix_file(p) for p in paths]
    tags = [m.tag for m in matrices]
    if len(set(tags)) != len(tags):
        raise DataError(f"duplicate (feature, model) tags: {sorted(tags)}")
    perspectives = assemble_perspectives(matrices)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return write_mining_reports(dataset, perspectives, variance_threshold,
                                quorum, trace_length, out_dir / "reports")
