from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from gsrcpd import cli
from gsrcpd.calibrate import ThresholdTable
from gsrcpd.errors import NumericalFault
from gsrcpd.manifest import manifest_path
from gsrcpd.simlab import TABLE_COLUMNS, ExperimentTable


@pytest.fixture
def thresholds_path(tmp_path: Path, write_csv) -> Path:
    train = np.random.default_rng(3).standard_normal((40, 2))
    source = write_csv("train.csv", train.tolist(), header=("a", "b"))
    out = tmp_path / "thresholds.json"
    code = cli.main(
        [
            "calibrate",
            "--input", str(source),
            "--window", "4",
            "--alpha", "0.1",
            "--reps", "60",
            "--seed", "3",
            "--symmetric",
            "--out", str(out),
        ]
    )
    # A table is written whether or not the family-wise level was reached.
    assert code in (cli.EXIT_OK, cli.EXIT_NOT_CONVERGED)
    return out


def test_calibrate_writes_table_and_manifest(thresholds_path: Path) -> None:
    table = ThresholdTable.load(thresholds_path)
    assert (table.n, table.d, table.seed, table.B) == (4, 2, 3, 60)
    assert table.symmetric
    assert set(table.thresholds) == set(table.stats)
    assert table.manifest["command"] == "calibrate"
    sidecar = json.loads(manifest_path(thresholds_path).read_text(encoding="utf-8"))
    assert len(sidecar["input_hashes"]) == 1


def test_calibrate_rejects_short_training(tmp_path: Path, write_csv) -> None:
    source = write_csv("short.csv", [[0.1], [0.2], [0.3]])
    code = cli.main(["calibrate", "--input", str(source), "--window", "4", "--out", str(tmp_path / "t.json")])
    assert code == cli.EXIT_USAGE
    assert not (tmp_path / "t.json").exists()


def test_calibrate_missing_input(tmp_path: Path) -> None:
    code = cli.main(["calibrate", "--input", str(tmp_path / "nope.csv"), "--window", "4", "--out", str(tmp_path / "t.json")])
    assert code == cli.EXIT_USAGE


@pytest.mark.parametrize("offline", [False, True])
def test_detect_writes_events(tmp_path: Path, write_csv, thresholds_path: Path, offline: bool) -> None:
    rng = np.random.default_rng(8)
    stream = np.vstack([rng.standard_normal((8, 2)), rng.standard_normal((8, 2)) + 8.0])
    source = write_csv("stream.csv", stream.tolist())
    out = tmp_path / "events.jsonl"
    argv = ["detect", "--input", str(source), "--thresholds", str(thresholds_path), "--out", str(out)]
    if offline:
        argv.append("--offline")
    assert cli.main(argv) == cli.EXIT_OK

    records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    for record in records:
        assert set(record) == {"t", "loc", "stat", "k", "value", "threshold", "n"}
        assert record["k"] == 4
        assert record["value"] > record["threshold"]
    manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
    assert len(manifest["input_hashes"]) == 2


def test_detect_empty_stream_has_no_events(tmp_path: Path, thresholds_path: Path) -> None:
    source = tmp_path / "empty.jsonl"
    source.write_text("", encoding="utf-8")
    out = tmp_path / "events.jsonl"
    code = cli.main(["detect", "--input", str(source), "--thresholds", str(thresholds_path), "--out", str(out)])
    assert code == cli.EXIT_OK
    assert out.read_text(encoding="utf-8") == ""
    assert manifest_path(out).exists()


def test_detect_dimension_mismatch_exits_2(tmp_path: Path, write_csv, thresholds_path: Path) -> None:
    source = write_csv("wide.csv", np.zeros((10, 3)).tolist())
    out = tmp_path / "events.jsonl"
    code = cli.main(["detect", "--input", str(source), "--thresholds", str(thresholds_path), "--out", str(out)])
    assert code == cli.EXIT_USAGE


def test_power_prints_json(capsys: pytest.CaptureFixture[str]) -> None:
    code = cli.main(["power", "--alpha", "0.025", "--beta", "0.5", "--n", "30", "--d", "10"])
    assert code == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["min_radius"] == pytest.approx(19.646, rel=1e-3)
    assert {"delta_mu", "delta_sigma_plus", "delta_sigma_minus"} <= set(payload)


def test_power_rejects_infeasible_beta() -> None:
    assert cli.main(["power", "--alpha", "0.5", "--beta", "0.6", "--n", "30", "--d", "10"]) == cli.EXIT_USAGE


def test_numerical_fault_exits_4(monkeypatch: pytest.MonkeyPatch) -> None:
    def explode(_inputs):
        raise NumericalFault("continued fraction diverged")

    monkeypatch.setattr(cli, "power_summary", explode)
    assert cli.main(["power", "--alpha", "0.025", "--beta", "0.5", "--n", "30", "--d", "10"]) == cli.EXIT_NUMERICAL


def test_simulate_writes_power_row_and_plot(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "power.csv"
    code = cli.main(
        [
            "simulate",
            "--scenario", "gauss_mean",
            "--n", "5",
            "--d", "2",
            "--trials", "6",
            "--reps", "100",
            "--alpha", "0.05",
            "--symmetric",
            "--out", str(out),
            "--emit-plot", "delta_mu",
        ]
    )
    assert code == cli.EXIT_OK
    assert "seed: " in capsys.readouterr().err
    with open(out, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 1
    assert tuple(rows[0]) == TABLE_COLUMNS
    assert rows[0]["method"] == "gsr_cg"
    assert manifest_path(out).exists()
    plot = Path(f"{out}.delta_mu.csv")
    assert plot.exists()
    assert manifest_path(plot).exists()
    with open(plot, newline="", encoding="utf-8") as handle:
        curve = list(csv.DictReader(handle))
    assert {row["d"] for row in curve} == {"2"}
    assert "5" in {row["n"] for row in curve}
    sidecar = json.loads(manifest_path(out).read_text(encoding="utf-8"))
    assert sidecar["config"]["training_length"] == 10 * 2 * 5


def test_simulate_hotelling_not_applicable_leaves_blank_metrics(tmp_path: Path) -> None:
    out = tmp_path / "power.csv"
    code = cli.main(
        ["simulate", "--scenario", "gauss_mean", "--n", "3", "--d", "8", "--trials", "4",
         "--detector", "hotelling", "--seed", "2", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    with open(out, newline="", encoding="utf-8") as handle:
        row = next(csv.DictReader(handle))
    assert row["p_mean"] == ""
    assert row["method"] == "hotelling"


def test_table_rejects_unknown_experiment(tmp_path: Path) -> None:
    assert cli.main(["table", "no_such_table", "--out", str(tmp_path / "t.csv")]) == cli.EXIT_USAGE


def test_table_emits_delta_mu_plot(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    def fake_run_table(experiment_id, **kwargs):
        row = {"method": "gsr_cg", "n": 30, "d": 30, "scenario": "er", "trials": 1, "seed": kwargs["seed"]}
        return ExperimentTable(experiment_id, [row], trials=1, reps=1, seed=kwargs["seed"], full=False)

    monkeypatch.setattr(cli, "run_table", fake_run_table)
    out = tmp_path / "er.csv"
    plot = tmp_path / "er_delta_mu.csv"
    argv = ["table", "er_connectivity", "--seed", "4", "--out", str(out), "--emit-plot", "delta_mu", "--plot-out", str(plot)]
    assert cli.main(argv) == cli.EXIT_OK
    with open(plot, newline="", encoding="utf-8") as handle:
        curve = list(csv.DictReader(handle))
    # 30 nodes give 435 edge indicators per observation.
    assert {row["d"] for row in curve} == {"435"}
    assert "30" in {row["n"] for row in curve}
    assert manifest_path(plot).exists()
    sidecar = json.loads(manifest_path(out).read_text(encoding="utf-8"))
    assert sidecar["config"]["training_windows"] == 10


def test_no_command_prints_help(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main([]) == cli.EXIT_OK
    assert "calibrate" in capsys.readouterr().out


def test_power_rich_panel_and_out_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "power.json"
    argv = ["power", "--alpha", "0.025", "--beta", "0.5", "--n", "30", "--d", "10", "--out", str(out), "--rich"]
    assert cli.main(argv) == cli.EXIT_OK
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "min_radius" in captured.err
    assert json.loads(out.read_text(encoding="utf-8"))["inputs"]["n"] == 30
    assert manifest_path(out).exists()
