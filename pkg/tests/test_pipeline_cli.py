import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from emocorr.cli import EXIT_DATA, EXIT_DIVERGED, EXIT_OK, EXIT_USAGE, main
from emocorr.confusion import CorrelationMatrix
from emocorr.errors import ConfigurationError, DataError
from emocorr.pipeline import (
    StageFailure,
    config_from_dict,
    load_config,
    mine_matrix_files,
    read_matrix_file,
    run_pipeline,
    write_matrix_file,
)
from emocorr.synthetic import (
    fixture_config,
    make_corpus,
    write_corpus_file,
    write_lexicon_file,
)

from oracles import random_row_stochastic

REPORT_NAMES = ("confusion_law.json", "evolution.json", "confusion_law.tsv",
                "absolute_scores.tsv", "evolution.tsv", "misjudgment.tsv")


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    """A small corpus plus lexicon, and one completed pipeline run."""
    root = tmp_path_factory.mktemp("fixture")
    write_corpus_file(make_corpus(seed=2, per_class=30), root / "comment.tsv")
    write_lexicon_file(root / "lexicon.tsv")
    config = fixture_config(root / "comment.tsv", root / "lexicon.tsv",
                            root / "out", epochs=6)
    (root / "config.json").write_text(json.dumps(config, indent=2))
    assert main(["run", "--config", str(root / "config.json")]) == EXIT_OK
    return root


def tree_digests(root):
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


class TestRun:
    def test_artifacts_written(self, fixture_dir):
        out = fixture_dir / "out"
        assert (out / "manifest.json").is_file()
        assert len(list((out / "comment/matrices").glob("*.tsv"))) == 6
        assert len(list((out / "comment/checkpoints").glob("*.npz"))) == 6
        for name in REPORT_NAMES:
            assert (out / "comment/reports" / name).is_file()
        assert (out / "comment/split.tsv").is_file()
        assert (out / "comment/summary.json").is_file()

    def test_manifest_lists_artifact_digests(self, fixture_dir):
        out = fixture_dir / "out"
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["failed_stage"] is None
        assert manifest["seed"] == 7
        for rel, digest in manifest["artifacts"].items():
            path = out / rel
            assert path.is_file()
            assert hashlib.sha256(path.read_bytes()).hexdigest() == digest
        assert "comment/summary.json" in manifest["artifacts"]

    def test_rerun_same_seed_byte_identical(self, fixture_dir, tmp_path):
        config = json.loads((fixture_dir / "config.json").read_text())
        config["out_dir"] = str(tmp_path / "again")
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        assert main(["run", "--config", str(cfg_path)]) == EXIT_OK
        assert tree_digests(fixture_dir / "out") == tree_digests(tmp_path / "again")

    def test_split_file_has_split_column(self, fixture_dir):
        lines = (fixture_dir / "out/comment/split.tsv").read_text().splitlines()
        assert len(lines) == 180
        tags = {line.rsplit("\t", 1)[1] for line in lines}
        assert tags == {"train", "test"}

    def test_summary_reports_sizes_and_accuracies(self, fixture_dir):
        summary = json.loads((fixture_dir / "out/comment/summary.json").read_text())
        assert summary["records"] == 180
        assert summary["train_size"] + summary["test_size"] == 180
        assert set(summary["accuracy"]) == {
            f"{v}_{m}" for v in ("character", "implicit", "explicit")
            for m in ("m1", "m2")}

    def test_missing_lexicon_names_path(self, fixture_dir, tmp_path, capsys):
        config = json.loads((fixture_dir / "config.json").read_text())
        config["lexicon_path"] = str(tmp_path / "nowhere.tsv")
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps(config))
        assert main(["run", "--config", str(cfg_path)]) == EXIT_USAGE
        assert "nowhere.tsv" in capsys.readouterr().err

    def test_malformed_corpus_exits_data_error_with_stage(self, fixture_dir,
                                                          tmp_path, capsys):
        bad_corpus = tmp_path / "bad.tsv"
        bad_corpus.write_text("r1\t1,2,3\ttext\n")
        config = json.loads((fixture_dir / "config.json").read_text())
        config["datasets"][0]["path"] = str(bad_corpus)
        config["out_dir"] = str(tmp_path / "out")
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps(config))
        assert main(["run", "--config", str(cfg_path)]) == EXIT_DATA
        err = capsys.readouterr().err
        assert "corpus:comment" in err
        # partial manifest still lands, naming the stage
        manifest = json.loads((tmp_path / "out/manifest.json").read_text())
        assert manifest["failed_stage"] == "corpus:comment"

    def test_divergence_exit_code(self, fixture_dir, tmp_path, capsys):
        config = json.loads((fixture_dir / "config.json").read_text())
        config["out_dir"] = str(tmp_path / "out")
        config["train"]["m1"]["learning_rate"] = 1e9
        config["train"]["m2"]["learning_rate"] = 1e9
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        assert main(["run", "--config", str(cfg_path)]) == EXIT_DIVERGED
        assert "train:comment" in capsys.readouterr().err

    def test_seed_override_changes_results(self, fixture_dir, tmp_path):
        config = json.loads((fixture_dir / "config.json").read_text())
        config["out_dir"] = str(tmp_path / "out")
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        assert main(["run", "--config", str(cfg_path), "--seed", "123"]) == EXIT_OK
        a = json.loads((fixture_dir / "out/comment/summary.json").read_text())
        b = json.loads((tmp_path / "out/comment/summary.json").read_text())
        assert a != b  # different split and init


class TestMine:
    def test_reproduces_run_reports_exactly(self, fixture_dir, tmp_path):
        matrices = sorted(str(p) for p in
                          (fixture_dir / "out/comment/matrices").glob("*.tsv"))
        scrambled = [matrices[i] for i in (3, 0, 5, 2, 1, 4)]
        assert main(["mine", *scrambled, "--out", str(tmp_path),
                     "--dataset-name", "comment"]) == EXIT_OK
        for name in REPORT_NAMES:
            want = (fixture_dir / "out/comment/reports" / name).read_bytes()
            got = (tmp_path / "reports" / name).read_bytes()
            assert got == want, name

    def test_identity_matrices_mine(self, tmp_path, capsys):
        tags = [("character", "m1"), ("character", "m2"), ("implicit", "m1"),
                ("implicit", "m2"), ("explicit", "m1"), ("explicit", "m2")]
        paths = []
        for feature, model in tags:
            m = CorrelationMatrix(values=np.eye(6), feature=feature, model=model)
            path = tmp_path / f"{feature}_{model}.tsv"
            write_matrix_file(m, path)
            paths.append(str(path))
        assert main(["mine", *paths, "--out", str(tmp_path / "out")]) == EXIT_OK
        evolution = json.loads((tmp_path / "out/reports/evolution.json").read_text())
        assert evolution["misjudgment_pairs"] == []
        assert all(rec["error"] == "no transfer path"
                   for rec in evolution["shortest_paths"])
        assert all(rec["error"] is not None and "unreachable" in rec["error"]
                   for rec in evolution["traces"])
        confusion = json.loads(
            (tmp_path / "out/reports/confusion_law.json").read_text())
        assert len(confusion["absolute_scores"]) == 6
        assert len(confusion["law_columns"]) == 12

    def test_bad_row_sum_names_row(self, fixture_dir, tmp_path, capsys):
        matrices = sorted(str(p) for p in
                          (fixture_dir / "out/comment/matrices").glob("*.tsv"))
        bad = np.full((6, 6), 1.0 / 6.0)
        bad[4] = 0.8 / 6.0  # row 4 sums to 0.8
        lines = ["# feature=explicit\tmodel=m9"]
        lines += ["\t".join(repr(float(v)) for v in row) for row in bad]
        bad_path = tmp_path / "bad.tsv"
        bad_path.write_text("\n".join(lines) + "\n")
        args = ["mine", *matrices[:5], str(bad_path), "--out", str(tmp_path / "o")]
        assert main(args) == EXIT_DATA
        assert "row 4" in capsys.readouterr().err

    def test_duplicate_tags_rejected(self, fixture_dir, tmp_path, capsys):
        matrices = sorted(str(p) for p in
                          (fixture_dir / "out/comment/matrices").glob("*.tsv"))
        args = ["mine", *matrices[:5], matrices[0], "--out", str(tmp_path / "o")]
        assert main(args) == EXIT_DATA
        assert "duplicate" in capsys.readouterr().err

    def test_wrong_file_count_rejected(self, fixture_dir, capsys):
        matrices = sorted(str(p) for p in
                          (fixture_dir / "out/comment/matrices").glob("*.tsv"))
        assert main(["mine", *matrices[:4], "--out", "x"]) == EXIT_USAGE


class TestMatrixFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        m = CorrelationMatrix(values=random_row_stochastic(rng),
                              feature="implicit", model="m2")
        write_matrix_file(m, tmp_path / "m.tsv")
        loaded = read_matrix_file(tmp_path / "m.tsv")
        assert np.array_equal(loaded.values, m.values)
        assert loaded.feature == "implicit" and loaded.model == "m2"

    def test_slightly_off_rows_renormalized(self, tmp_path):
        values = np.full((6, 6), 1.0 / 6.0)
        values[0, 0] += 5e-7  # within the 1e-6 acceptance, off beyond 1e-12
        lines = ["# feature=a\tmodel=b"]
        lines += ["\t".join(repr(float(v)) for v in row) for row in values]
        (tmp_path / "m.tsv").write_text("\n".join(lines) + "\n")
        loaded = read_matrix_file(tmp_path / "m.tsv")
        assert abs(loaded.values[0].sum() - 1.0) < 1e-12

    def test_header_required(self, tmp_path):
        (tmp_path / "m.tsv").write_text("1\t0\t0\t0\t0\t0\n")
        with pytest.raises(Exception, match="header"):
            read_matrix_file(tmp_path / "m.tsv")


class TestConfig:
    def test_overrides_apply(self, fixture_dir):
        data = json.loads((fixture_dir / "config.json").read_text())
        config = config_from_dict(data, {"seed": 99, "quorum": 3,
                                         "trace_length": 4,
                                         "variance_threshold": 0.9})
        assert config.seed == 99
        assert config.quorum == 3
        assert config.trace_length == 4
        assert config.variance_threshold == 0.9

    def test_validation_errors(self, fixture_dir):
        data = json.loads((fixture_dir / "config.json").read_text())
        bad = dict(data, trace_length=9)
        with pytest.raises(ConfigurationError):
            config_from_dict(bad)
        bad = dict(data, datasets=[])
        with pytest.raises(ConfigurationError):
            config_from_dict(bad)
        bad = json.loads(json.dumps(data))
        bad["train"]["m1"]["learning_rate"] = 0.0
        with pytest.raises(ConfigurationError):
            config_from_dict(bad)

    def test_config_file_not_json(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text("not json {")
        assert main(["run", "--config", str(path)]) == EXIT_USAGE


class TestReportCommand:
    def test_prints_summary(self, fixture_dir, capsys):
        assert main(["report", "--out", str(fixture_dir / "out")]) == EXIT_OK
        out = capsys.readouterr().out
        assert "comment" in out
        assert "m1" in out and "m2" in out

    def test_empty_dir_is_data_error(self, tmp_path, capsys):
        assert main(["report", "--out", str(tmp_path)]) == EXIT_DATA

    def test_usage_error_on_unknown_command(self, capsys):
        assert main(["explode"]) == EXIT_USAGE
