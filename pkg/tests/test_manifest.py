from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync import __version__
from limitcycle_sync.config.settings import load_config
from limitcycle_sync.core.errors import ConfigError
from limitcycle_sync.core.manifest_store import (
    compare_outputs,
    config_drift,
    load_manifest,
    record_output,
    version_status,
    write_manifest,
)
from limitcycle_sync.models.manifest import CheckStatus, OutputCheck, RunManifest, VerifyReport
from limitcycle_sync.utils.csv_io import read_table, write_table
from limitcycle_sync.utils.version_compare import classify_difference


@pytest.fixture
def manifest(tmp_path):
    out = tmp_path / "run"
    write_table(out / "a.csv", {"x": np.array([0.1, 0.2]), "y": np.array([1.0, np.nan])})
    write_table(out / "b.csv", {"x": np.array([3.0])})
    m = RunManifest(tool_version=__version__, command=["fp"], config=load_config().as_dict(), master_seed=0)
    for name in ("a.csv", "b.csv"):
        record_output(m, out / name, out)
    write_manifest(m, out)
    return m, out


def test_round_trip(manifest):
    m, out = manifest
    loaded = load_manifest(out)
    assert loaded.command == ["fp"]
    assert loaded.config == m.config
    assert [o.to_dict() for o in loaded.outputs] == [o.to_dict() for o in m.outputs]


def test_csv_is_byte_stable(tmp_path):
    cols = {"theta": np.linspace(-np.pi, np.pi, 5, endpoint=False), "density": np.full(5, 1 / (2 * np.pi))}
    a = write_table(tmp_path / "a.csv", cols).read_bytes()
    b = write_table(tmp_path / "b.csv", cols).read_bytes()
    assert a == b
    assert a.splitlines()[0] == b"theta,density"
    np.testing.assert_array_equal(read_table(tmp_path / "a.csv")["theta"], cols["theta"])


def test_compare_statuses(manifest, tmp_path):
    m, _ = manifest
    rerun = tmp_path / "rerun"
    write_table(rerun / "a.csv", {"x": np.array([0.1, 0.2]), "y": np.array([1.0, np.nan])})
    write_table(rerun / "b.csv", {"x": np.array([3.5])})
    checks = {c.path: c.status for c in compare_outputs(m, rerun)}
    assert checks == {"a.csv": CheckStatus.MATCH, "b.csv": CheckStatus.MISMATCH}
    (rerun / "b.csv").unlink()
    checks = {c.path: c.status for c in compare_outputs(m, rerun)}
    assert checks["b.csv"] == CheckStatus.MISSING


def test_report_needs_every_output_to_match():
    report = VerifyReport(
        "m.yaml", "0.1.0", "0.1.0", "same", ["fp"],
        checks=[OutputCheck("a.csv", CheckStatus.MATCH), OutputCheck("b.csv", CheckStatus.EXTRA)],
    )
    assert not report.ok
    assert report.summary == "extra=1, match=1"
    assert not VerifyReport("m.yaml", "0.1.0", "0.1.0", "same", ["fp"]).ok


def test_drift_ignores_output_location():
    base = load_config().as_dict()
    moved = load_config(overrides={"output.dir": "elsewhere", "threads": 4}).as_dict()
    assert config_drift(base, moved) == []
    changed = load_config(overrides={"pair.D": 0.2}).as_dict()
    drift = config_drift(base, changed)
    assert len(drift) == 1
    assert "pair" in drift[0] and "0.2" in drift[0]


def test_not_a_manifest(tmp_path):
    (tmp_path / "manifest.yaml").write_text("outputs: []\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_manifest(tmp_path)
    with pytest.raises(ConfigError):
        load_manifest(tmp_path / "missing")


@pytest.mark.parametrize(
    "recorded,current,expected",
    [
        ("0.1.0", "0.1.0", "same"),
        ("0.1.0", "0.2.0", "newer"),
        ("1.0", "0.9", "older"),
        ("dev", "0.1.0", "unknown"),
        ("v0.1.0", "0.1.0", "same"),
    ],
)
def test_version_classification(recorded, current, expected):
    assert classify_difference(recorded, current) == expected


def test_version_status_of_foreign_manifest(manifest):
    m, _ = manifest
    assert version_status(m) == "same"
    m.tool_version = "0.0.1"
    assert version_status(m) in ("newer", "older")
