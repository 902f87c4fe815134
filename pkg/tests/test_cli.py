from __future__ import annotations

import json

import numpy as np
import pytest
import yaml
from typer.testing import CliRunner

from limitcycle_sync import __version__
from limitcycle_sync.cli.app import app
from limitcycle_sync.utils.csv_io import read_table

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(app, list(args))


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_saddle_json(tmp_path):
    result = invoke(
        "saddle", "--pair", "--gamma1", "1", "--gamma2", "0.1", "--D", "0.1", "--delta", "0",
        "-o", "json", "--out-dir", str(tmp_path),
    )
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["r_sq"] == pytest.approx(10.0, rel=1e-10)
    assert data["theta0"] == pytest.approx(np.pi, abs=1e-10)
    assert data["branch"] == "synchronized"
    table = read_table(tmp_path / "saddle.csv")
    assert table["nu"][0] == pytest.approx(1.0)
    manifest = yaml.safe_load((tmp_path / "manifest.yaml").read_text())
    assert manifest["command"] == ["saddle", "--pair"]
    assert manifest["config"]["pair"]["D"] == 0.1
    assert [o["path"] for o in manifest["outputs"]] == ["saddle.csv"]


def test_single_saddle_from_photon_number(tmp_path):
    result = invoke("saddle", "--single", "--photons", "5", "-o", "json", "--out-dir", str(tmp_path))
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["r_sq"] == pytest.approx(10.0)


def test_unknown_flag_is_usage_error(tmp_path):
    result = invoke("saddle", "--bogus", "--out-dir", str(tmp_path))
    assert result.exit_code == 2


def test_unknown_system_is_usage_error(tmp_path):
    result = invoke("simulate", "--system", "triple", "--out-dir", str(tmp_path))
    assert result.exit_code == 2


def test_bad_config_exits_2_with_line(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("seed: 1\npair:\n  kappa: 1\n", encoding="utf-8")
    result = invoke("saddle", "--config", str(config), "--out-dir", str(tmp_path / "out"))
    assert result.exit_code == 2
    assert "pair.kappa" in result.output
    assert "line 3" in result.output
    assert not (tmp_path / "out" / "manifest.yaml").exists()


def test_step_too_large_exits_3(tmp_path):
    result = invoke("simulate", "--system", "adler", "--dt", "0.2", "--T", "1", "--out-dir", str(tmp_path))
    assert result.exit_code == 3
    assert "StepTooLarge" in result.output


def test_pair_outside_tongue_exits_3(tmp_path):
    result = invoke(
        "simulate", "--system", "pair", "--model", "markovian", "--delta", "0.5", "--D", "0.1",
        "--T", "1", "--out-dir", str(tmp_path),
    )
    assert result.exit_code == 3


def test_simulate_writes_trajectory(tmp_path):
    result = invoke(
        "simulate", "--system", "adler", "--dt", "0.01", "--T", "2", "--stride", "10", "--out-dir", str(tmp_path),
    )
    assert result.exit_code == 0, result.output
    table = read_table(tmp_path / "trajectory.csv")
    assert list(table) == ["t", "theta_minus"]
    assert table["t"].size == 21


def test_fp_then_verify(tmp_path):
    run = tmp_path / "run"
    result = invoke("fp", "--n-bins", "64", "--n-grid", "512", "--out-dir", str(run))
    assert result.exit_code == 0, result.output
    table = read_table(run / "fp.csv")
    assert table["density"].sum() * 2 * np.pi / 64 == pytest.approx(1.0, abs=1e-10)

    result = invoke("verify", str(run / "manifest.yaml"), "-o", "json")
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["ok"]
    assert report["config_drift"] == []

    (run / "fp.csv").write_text("theta,density\n0,0\n", encoding="utf-8")
    result = invoke("verify", str(run), "-o", "json")
    assert result.exit_code == 1
    assert json.loads(result.stdout)["outputs"][0]["status"] == "mismatch"


def test_verify_missing_manifest(tmp_path):
    result = invoke("verify", str(tmp_path / "nowhere"))
    assert result.exit_code == 2


def test_diffusion_row(tmp_path):
    result = invoke("diffusion", "--photons", "10", "--delta", "0", "-o", "json", "--out-dir", str(tmp_path))
    assert result.exit_code == 0, result.output
    table = read_table(tmp_path / "diffusion.csv")
    assert list(table) == ["Delta_over_D", "sigma_minus_sq", "sigma0_sq", "ratio", "ci_low", "ci_high"]
    assert 0 < table["ratio"][0] < 1
    assert np.isnan(table["ci_low"][0])


def test_lindblad_small_cutoff(tmp_path):
    result = invoke("lindblad", "--photons", "1", "--cutoff", "14", "-o", "json", "--out-dir", str(tmp_path))
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["residual"] < 1e-9
    assert data["mean_photons"][0] == pytest.approx(data["mean_photons"][1])
    assert data["fourier_vs_grid_linf"] < 1e-8


def test_lindblad_cutoff_too_small_exits_3(tmp_path):
    result = invoke("lindblad", "--photons", "10", "--cutoff", "8", "--out-dir", str(tmp_path))
    assert result.exit_code == 3
    assert "CutoffTooSmall" in result.output


def test_reproduce_rejects_unknown_target(tmp_path):
    result = invoke("reproduce", "fig9", "--out-dir", str(tmp_path))
    assert result.exit_code == 2
