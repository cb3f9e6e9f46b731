"""
End-to-end tests for the experiment runner and the command line
"""
import csv
import json
import math
import os

import pytest

import cli
from schemas.report import ExperimentName
from services import experiments
from utils.config_file import parse_config
from utils.validation import DomainError, ReportWriteError

SETTINGS = {
    "LAB_HOOP_COEFFICIENT": 1.0,
    "LAB_CAUSALITY_COEFFICIENT": 1.0,
    "LAB_EPSILON_COUPLING": 1.0,
    "LAB_HOLOGRAPHIC_THRESHOLD": 1.0,
}

CONFIGS = {
    "bound": "r = 1, 10\n",
    "distinguish": "n_angles = 5\nmesh = 256\ngrid_epsilon = 0.3\nstates = 50\n",
    "lattice": "n_sites = 256\nlength = 100\nsigmas = 5\nrandom_states = 50\ntrace_sizes = 8, 16\n",
    "circle": "n_sites = 512\nmass = 100\nradius = 1\nsigma = 0.1\ntimes = 0.25, 0.5, 1.0\n",
    "holography": "epsilon = 0.01\nn_values = 10, 30, 100, 300, 1000\ntrials = 100\nr = 10\n",
}


def _text(name, output_path, output_format="csv", body=None, seed=42):
    return (
        f"[experiment]\nname = {name}\nseed = {seed}\noutput_path = {output_path}\n"
        f"output_format = {output_format}\n\n[{name}]\n{CONFIGS[name] if body is None else body}"
    )


def _config(name, output_path, **kwargs):
    return parse_config(_text(name, output_path, **kwargs), settings=SETTINGS)


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_bound_experiment(tmp_path):
    path = tmp_path / "bound.csv"
    report = experiments.run(_config("bound", path))
    rows = _read_csv(path)
    assert list(rows[0]) == report.columns
    assert [float(row["r"]) for row in rows] == [1.0, 10.0]
    first = report.rows[0]
    assert first["analytic_delta_phi"] == pytest.approx(0.70711, abs=1e-5)
    assert first["scan_delta_phi"] == pytest.approx(0.70711, rel=0.01)
    assert rows[0]["bound_respected"] == "true"
    assert report.summary["scan_within_1pct"]
    assert report.summary["refinement_halves_gap"]
    assert report.summary["bound_respected"]


def test_bound_experiment_at_extreme_sizes(tmp_path):
    report = experiments.run(_config("bound", tmp_path / "b.csv", body="r = 1e-120, 1e110\n"), write=False)
    assert [row["r"] for row in report.rows] == [1e-120, 1e110]
    assert all(math.isfinite(row["scan_delta_phi"]) for row in report.rows)
    assert report.summary["scan_within_1pct"]
    assert report.summary["bound_respected"]


def test_distinguish_experiment(tmp_path):
    report = experiments.run(_config("distinguish", tmp_path / "d.csv"), write=False)
    assert len(report.rows) == 5
    assert report.rows[0]["helstrom_success"] == pytest.approx(0.5)
    assert report.rows[-1]["helstrom_success"] == pytest.approx(1.0)
    assert report.rows[2]["helstrom_success"] == pytest.approx(0.85355, abs=1e-5)
    assert report.summary["max_abs_difference"] < 1e-3
    assert report.summary["snapped_fixed_fraction"] >= 0.9
    assert report.summary["grid_mesh_diameter"] <= 0.3
    assert not (tmp_path / "d.csv").exists()


def test_lattice_experiment(tmp_path):
    report = experiments.run(_config("lattice", tmp_path / "l.csv"), write=False)
    (row,) = report.rows
    assert row["product"] == pytest.approx(0.5, rel=0.01)
    assert row["canonical_deviation"] < 0.01
    assert not row["wrapped"]
    assert report.summary["uncertainty_persists"]
    assert report.summary["max_abs_trace"] < 1e-8
    assert [t["canonical_trace_im"] for t in report.summary["trace_checks"]] == [8.0, 16.0]


def test_circle_experiment(tmp_path):
    report = experiments.run(_config("circle", tmp_path / "c.csv"), write=False)
    assert [row["t"] for row in report.rows] == [0.25, 0.5, 1.0]
    assert all(row["relative_error"] < 0.02 for row in report.rows)
    assert report.summary["linear"]
    assert report.summary["slope_relative_error"] < 0.02


def test_holography_experiment(tmp_path):
    path = tmp_path / "h.jsonl"
    report = experiments.run(_config("holography", path, output_format="json-lines"))
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert [line["n"] for line in lines] == [10, 30, 100, 300, 1000]
    assert list(lines[0]) == report.columns
    assert all(line["regime"] == "small" for line in lines)
    assert report.summary["slope_in_band"]
    assert report.summary["within_3se_of_closed_form"]
    assert report.summary["capacity"] == 100
    assert report.summary["required_epsilon"] == pytest.approx(0.1)
    assert report.summary["chain_consistent"]
    assert report.summary["min_angle"] == pytest.approx(1 / (math.sqrt(2) * 10))


def test_saturation_row_joins_the_table(tmp_path):
    body = CONFIGS["holography"] + "saturation_n = 100000\nsaturation_trials = 100\n"
    report = experiments.run(_config("holography", tmp_path / "h.csv", body=body), write=False)
    last = report.rows[-1]
    assert (last["n"], last["regime"]) == (100_000, "saturation")
    assert last["mean_dist_sq"] == pytest.approx(2.0, rel=0.02)


def test_reruns_are_byte_identical(tmp_path):
    body = (
        "epsilon = 0.01\nn_values = 10, 30, 100, 300\ntrials = 200\n"
        "mode = gaussian-magnitude\nphase_convention = random-phase\n"
    )
    first = experiments.run(_config("holography", tmp_path / "a.csv", body=body), workers=1)
    experiments.run(_config("holography", tmp_path / "b.csv", body=body), workers=3)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    experiments.run(_config("holography", tmp_path / "c.csv", body=body, seed=43))
    assert (tmp_path / "c.csv").read_bytes() != (tmp_path / "a.csv").read_bytes()
    assert first.rows[0]["seed"] == 42


def test_metadata_sidecar(tmp_path):
    path = tmp_path / "bound.csv"
    experiments.run(_config("bound", path))
    meta = json.loads((tmp_path / "bound.csv.meta.json").read_text())
    assert meta["tool"] == "planck-lab"
    assert meta["constants_version"] == "codata-2018.1"
    assert len(meta["constants_sha256"]) == 64
    assert meta["config"]["parameters"]["r"] == [1.0, 10.0]
    assert meta["results_path"] == str(path)
    assert meta["row_count"] == 2
    assert "rows" not in meta
    assert sorted(os.listdir(tmp_path)) == ["bound.csv", "bound.csv.meta.json"]


def test_unwritable_output_raises_report_write_error(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    with pytest.raises(ReportWriteError) as info:
        experiments.write_files({str(blocker / "out.csv"): "x\n"})
    assert info.value.path == str(blocker / "out.csv")


def test_failed_sidecar_leaves_the_previous_report_intact(tmp_path):
    path = tmp_path / "bound.csv"
    experiments.run(_config("bound", path, body="r = 1\n"))
    table = path.read_bytes()
    sidecar = tmp_path / "bound.csv.meta.json"
    sidecar.unlink()
    sidecar.mkdir()

    with pytest.raises(ReportWriteError) as info:
        experiments.run(_config("bound", path, body="r = 2\n"))
    assert info.value.path == str(sidecar)
    assert path.read_bytes() == table
    assert sorted(os.listdir(tmp_path)) == ["bound.csv", "bound.csv.meta.json"]



def _write_config(tmp_path, text):
    path = tmp_path / "experiment.ini"
    path.write_text(text)
    return str(path)


def test_cli_version(capsys):
    assert cli.main(["version"]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "success"
    assert payload["data"]["constants_version"] == "codata-2018.1"


def test_cli_validate(tmp_path, capsys):
    path = _write_config(tmp_path, _text("bound", tmp_path / "out.csv"))
    assert cli.main(["validate", path]) == cli.EXIT_OK
    assert json.loads(capsys.readouterr().out)["parameters"]["r"] == [1.0, 10.0]


def test_cli_invalid_config(tmp_path, capsys):
    path = _write_config(tmp_path, _text("bound", tmp_path / "out.csv", body="r = -1\n"))
    assert cli.main(["run", path]) == cli.EXIT_INVALID_CONFIG
    payload = json.loads(capsys.readouterr().err)
    assert payload["status"] == "validation_error"
    assert payload["metadata"]["exit_code"] == 2
    assert any("r > 0" in issue for issue in payload["data"]["issues"])
    assert not (tmp_path / "out.csv").exists()


def test_cli_run_with_overrides(tmp_path, capsys):
    path = _write_config(tmp_path, _text("circle", tmp_path / "ignored.csv"))
    out = tmp_path / "circle.jsonl"
    assert cli.main(["run", path, "--output", str(out), "--format", "json-lines"]) == cli.EXIT_OK
    assert len(out.read_text().splitlines()) == 3
    assert not (tmp_path / "ignored.csv").exists()
    assert json.loads(capsys.readouterr().out)["data"]["rows"] == 3


def test_cli_computation_failure(tmp_path, capsys, monkeypatch):
    def diverging(parameters, seed, workers):
        raise DomainError("overlap product diverged")

    monkeypatch.setitem(experiments.RUNNERS, ExperimentName.BOUND, diverging)
    path = _write_config(tmp_path, _text("bound", tmp_path / "out.csv", body="r = 1\n"))
    assert cli.main(["run", path]) == cli.EXIT_COMPUTATION
    payload = json.loads(capsys.readouterr().err)
    assert payload["status"] == "computation_error"
    assert payload["error"] == "overlap product diverged"
    assert not (tmp_path / "out.csv").exists()


def test_cli_io_failure(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    path = _write_config(tmp_path, _text("bound", blocker / "out.csv", body="r = 1\n"))
    assert cli.main(["run", path]) == cli.EXIT_IO
    assert json.loads(capsys.readouterr().err)["status"] == "io_error"
