import json

import numpy as np
import pytest

from pushift.cli import main
from pushift.prior import build_intervals


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("data") / "d"
    code = main([
        "synth", "--case", "1", "--seed", "5", "--out", str(out),
        "--n-train-pos", "80", "--n-train-unl", "400",
        "--n-val-pos", "100", "--n-val-unl", "400", "--n-test", "400",
    ])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def trained_run(dataset_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("run") / "r"
    code = main([
        "train", "--data", str(dataset_dir), "--out", str(out),
        "--seed", "5", "--gamma", "0.9", "--epochs", "40",
        "--batch-size", "80", "--learning-rate", "5e-4",
    ])
    assert code == 0
    return out


class TestSynth:
    def test_deterministic_files(self, tmp_path):
        args = ["synth", "--case", "1", "--seed", "7", "--n-train-pos", "30",
                "--n-train-unl", "100", "--n-val-pos", "20", "--n-val-unl", "60",
                "--n-test", "50"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        for name in ("train_pos.csv", "train_unl.csv", "val_pos.csv", "val_unl.csv",
                     "test_unl.csv", "eval_test.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        ma = read_json(tmp_path / "a" / "manifest.json")
        mb = read_json(tmp_path / "b" / "manifest.json")
        assert ma["config_hash"] == mb["config_hash"]

    def test_case_defaults_match_reference_counts(self, tmp_path):
        assert main(["synth", "--case", "1", "--seed", "0", "--out", str(tmp_path / "c")]) == 0
        m = read_json(tmp_path / "c" / "manifest.json")
        assert m["counts"] == {
            "train_pos": 200, "train_unl": 1000, "val_pos": 100, "val_unl": 500, "test": 1000,
        }
        assert m["config"]["train_prior"] == 0.4
        assert m["config"]["test_prior"] == 0.6

    def test_training_files_carry_no_labels(self, dataset_dir):
        for name in ("train_unl.csv", "val_unl.csv", "test_unl.csv"):
            with open(dataset_dir / name) as fh:
                first = fh.readline().strip().split(",")
            assert len(first) == 1  # one feature column, no label

    def test_invalid_prior_exit_code(self, tmp_path):
        assert main(["synth", "--train-prior", "1.5", "--out", str(tmp_path / "x")]) == 2

    def test_unknown_config_field_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"cases": 1}')
        assert main(["synth", "--config", str(cfg), "--out", str(tmp_path / "y")]) == 2


class TestTrain:
    def test_report_contents(self, trained_run):
        report = read_json(trained_run / "report.json")
        assert report["method"] == "drpu"
        assert 0.0 <= report["pi_hat"]["value"] <= 1.0
        assert len(report["train_report"]["val_objective"]) == 40
        assert report["seed"] == 5 and report["config_hash"]
        assert (trained_run / "model.json").exists()
        assert (trained_run / "intervals.json").exists()

    def test_trace_csv_written(self, trained_run):
        lines = (trained_run / "trace.csv").read_text().strip().splitlines()
        assert lines[0] == "epoch,train_objective,val_objective,corrected_fraction"
        assert len(lines) == 41  # header + one row per epoch

    def test_rerun_with_same_hash_reproduces_numeric_fields(self, dataset_dir, tmp_path):
        args = [
            "train", "--data", str(dataset_dir), "--seed", "11", "--gamma", "0.9",
            "--epochs", "6", "--batch-size", "80", "--learning-rate", "5e-4",
        ]
        assert main(args + ["--out", str(tmp_path / "r1")]) == 0
        assert main(args + ["--out", str(tmp_path / "r2")]) == 0
        a = read_json(tmp_path / "r1" / "report.json")
        b = read_json(tmp_path / "r2" / "report.json")
        assert a["config_hash"] == b["config_hash"]
        assert a["pi_hat"] == b["pi_hat"]
        assert a["train_report"] == b["train_report"]
        assert (tmp_path / "r1" / "model.json").read_bytes() == (tmp_path / "r2" / "model.json").read_bytes()
        assert (tmp_path / "r1" / "intervals.json").read_bytes() == (tmp_path / "r2" / "intervals.json").read_bytes()

    def test_missing_data_dir_exit_code(self, tmp_path):
        assert main(["train", "--data", str(tmp_path / "nope"), "--out", str(tmp_path / "o")]) == 3

    def test_divergence_exit_code(self, dataset_dir, tmp_path):
        with np.errstate(over="ignore", invalid="ignore"):
            code = main([
                "train", "--data", str(dataset_dir), "--out", str(tmp_path / "dv"),
                "--epochs", "3", "--batch-size", "80", "--learning-rate", "1e200",
            ])
        assert code == 4

    def test_baseline_requires_prior(self, dataset_dir, tmp_path):
        assert main([
            "train", "--data", str(dataset_dir), "--out", str(tmp_path / "b0"),
            "--method", "nnpu", "--epochs", "2", "--batch-size", "80",
        ]) == 2

    def test_baseline_trains_with_prior(self, dataset_dir, tmp_path):
        out = tmp_path / "b1"
        code = main([
            "train", "--data", str(dataset_dir), "--out", str(out),
            "--method", "upu", "--loss", "logistic", "--prior", "0.4",
            "--epochs", "5", "--batch-size", "80", "--learning-rate", "1e-3",
        ])
        assert code == 0
        report = read_json(out / "report.json")
        assert report["prior_source"] == "user-supplied"


class TestAdapt:
    def test_adapt_and_evaluate(self, dataset_dir, trained_run, tmp_path):
        adapted = tmp_path / "adapted.json"
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(trained_run / "intervals.json"),
            "--test", str(dataset_dir / "test_unl.csv"),
            "--report", str(trained_run / "report.json"),
            "--out", str(adapted),
        ])
        assert code == 0
        doc = read_json(adapted)
        # threshold recomputed independently from the reported estimates
        pi, pip, c = doc["pi_hat"], doc["pi_prime"]["value"], doc["cost"]
        pip = min(1 - 1e-6, max(1e-6, pip))
        c0 = c * pi * (1 - pip) / ((1 - c) * (1 - pi) * pip + c * pi * (1 - pip))
        assert doc["theta"] == pytest.approx(c0 / pi, abs=1e-12)

        metrics = tmp_path / "metrics.json"
        metrics_csv = tmp_path / "rows.csv"
        code = main([
            "evaluate", "--model", str(trained_run / "model.json"),
            "--adapted", str(adapted),
            "--test", str(dataset_dir / "eval_test.csv"),
            "--out", str(metrics), "--append-csv", str(metrics_csv),
        ])
        assert code == 0
        doc = read_json(metrics)
        assert 0.0 <= doc["accuracy"] <= 1.0
        assert doc["auc"] is not None
        assert "boundary" in doc
        # provenance flows from the training report through adapt to metrics
        assert doc["seed"] == 5 and doc["config_hash"]
        rows = metrics_csv.read_text().strip().splitlines()
        assert rows[0].startswith("tag,theta,boundary,accuracy")
        assert len(rows) == 2

    def test_no_shift_theta_collapses(self, dataset_dir, trained_run, tmp_path):
        """Val-unlabeled as the test set gives pi_prime == pi_hat exactly."""
        adapted = tmp_path / "noshift.json"
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(trained_run / "intervals.json"),
            "--test", str(dataset_dir / "val_unl.csv"),
            "--report", str(trained_run / "report.json"),
            "--out", str(adapted),
        ])
        assert code == 0
        doc = read_json(adapted)
        assert doc["pi_prime"]["value"] == pytest.approx(doc["pi_hat"], abs=1e-12)
        assert doc["theta"] == pytest.approx(0.5 / doc["pi_hat"], abs=1e-10)

    def test_corrupted_intervals_no_output(self, dataset_dir, trained_run, tmp_path):
        bad = tmp_path / "bad_intervals.json"
        doc = read_json(trained_run / "intervals.json")
        doc["accept_counts"] = doc["accept_counts"][::-1]
        bad.write_text(json.dumps(doc))
        out = tmp_path / "should_not_exist.json"
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(bad),
            "--test", str(dataset_dir / "test_unl.csv"),
            "--pi-hat", "0.4", "--out", str(out),
        ])
        assert code == 3
        assert not out.exists()

    def test_degenerate_intervals_exit_code(self, dataset_dir, trained_run, tmp_path):
        tiny = tmp_path / "tiny_intervals.json"
        build_intervals(np.linspace(0.1, 0.9, 5), gamma=0.5).save(tiny)
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(tiny),
            "--test", str(dataset_dir / "test_unl.csv"),
            "--pi-hat", "0.4", "--out", str(tmp_path / "deg.json"),
        ])
        assert code == 5

    def test_isolated_adapt_matches_in_process_raw_scores(
        self, dataset_dir, trained_run, tmp_path
    ):
        """Model + intervals + test file reproduce the raw-score pipeline exactly."""
        from pushift.classifier import ShiftSpec, cost_threshold
        from pushift.data import load_csv
        from pushift.models import load_model
        from pushift.prior import build_intervals, estimate_test_prior

        adapted_path = tmp_path / "iso.json"
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(trained_run / "intervals.json"),
            "--test", str(dataset_dir / "test_unl.csv"),
            "--report", str(trained_run / "report.json"),
            "--out", str(adapted_path),
        ])
        assert code == 0
        via_files = read_json(adapted_path)

        # in-process rerun that keeps the raw validation positive scores
        model = load_model(trained_run / "model.json")
        val_pos, _ = load_csv(dataset_dir / "val_pos.csv")
        test_unl, _ = load_csv(dataset_dir / "test_unl.csv")
        report = read_json(trained_run / "report.json")
        intervals = build_intervals(model.predict(val_pos), gamma=report["gamma"])
        pi_prime = estimate_test_prior(intervals, model.predict(test_unl))
        pi_hat = report["pi_hat"]["value"]
        _, theta = cost_threshold(ShiftSpec(pi_hat, pi_prime.value, 0.5))

        assert via_files["pi_prime"]["value"] == pi_prime.value
        assert via_files["theta"] == theta

    def test_labeled_test_file_rejected(self, dataset_dir, trained_run, tmp_path):
        code = main([
            "adapt", "--model", str(trained_run / "model.json"),
            "--intervals", str(trained_run / "intervals.json"),
            "--test", str(dataset_dir / "eval_test.csv"),
            "--pi-hat", "0.4", "--out", str(tmp_path / "z.json"),
        ])
        assert code == 3


class TestEvaluate:
    def test_explicit_theta_for_baselines(self, dataset_dir, trained_run, tmp_path):
        metrics = tmp_path / "m0.json"
        code = main([
            "evaluate", "--model", str(trained_run / "model.json"),
            "--theta", "0.5", "--test", str(dataset_dir / "eval_test.csv"),
            "--out", str(metrics),
        ])
        assert code == 0
        assert read_json(metrics)["theta"] == 0.5

    def test_needs_threshold_source(self, dataset_dir, trained_run, tmp_path):
        code = main([
            "evaluate", "--model", str(trained_run / "model.json"),
            "--test", str(dataset_dir / "eval_test.csv"),
            "--out", str(tmp_path / "m1.json"),
        ])
        assert code == 2


class TestVerifyTheory:
    def test_passes_and_writes_report(self, tmp_path, capsys):
        out = tmp_path / "theory.json"
        code = main(["verify-theory", "--seed", "1", "--trials", "40", "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert printed.count("PASS") == 6
        doc = read_json(out)
        assert all(s["passed"] for s in doc["suites"])


class TestSweep:
    def test_sweep_spawns_independent_runs(self, dataset_dir, tmp_path):
        out = tmp_path / "sw"
        code = main([
            "train", "--data", str(dataset_dir), "--out", str(out),
            "--seed", "3", "--sweep", "2", "--epochs", "2",
            "--batch-size", "80", "--gamma", "0.9",
        ])
        assert code == 0
        for k in (3, 4):
            assert (tmp_path / f"sw-seed{k}" / "report.json").exists()
