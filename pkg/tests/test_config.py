from __future__ import annotations

import pytest

from limitcycle_sync.config.factories import noise_convention, pair_params, self_energy_model, steady_state_method
from limitcycle_sync.config.settings import DEFAULTS, THREADS_ENV, dump_config, load_config
from limitcycle_sync.core.errors import ConfigError
from limitcycle_sync.models import NoiseConvention, SteadyStateMethod
from limitcycle_sync.models.self_energy import LorentzianGain, MarkovianPair


def write(tmp_path, text: str):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_empty_file_gives_defaults(tmp_path):
    settings = load_config(write(tmp_path, ""))
    assert settings.as_dict() == DEFAULTS
    assert load_config().as_dict() == DEFAULTS


def test_flags_win_over_file(tmp_path):
    path = write(tmp_path, "pair:\n  D: 0.3\nseed: 7\n")
    settings = load_config(path)
    assert settings.get("pair.D") == 0.3
    assert settings.get("seed") == 7
    settings = load_config(path, {"pair.D": 0.4, "seed": None})
    assert settings.get("pair.D") == 0.4
    assert settings.get("seed") == 7


def test_integer_accepted_for_float_field(tmp_path):
    settings = load_config(write(tmp_path, "simulation:\n  T: 50\n"))
    assert settings.get("simulation.T") == 50.0
    assert isinstance(settings.get("simulation.T"), float)


def test_unknown_key_reports_its_line(tmp_path):
    path = write(tmp_path, "seed: 1\npair:\n  D: 0.2\n  kappa: 3\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "pair.kappa"
    assert info.value.line == 4
    assert "line 4" in str(info.value)


@pytest.mark.parametrize(
    "text,field",
    [
        ("seed: abc\n", "seed"),
        ("simulation:\n  multiplicative: 1\n", "simulation.multiplicative"),
        ("pair: 3\n", "pair"),
        ("diffusion:\n  photon_numbers: [5, x]\n", "diffusion.photon_numbers"),
        ("lindblad:\n  method: eig\n", "lindblad.method"),
        ("simulation:\n  dt: -1\n", "simulation.dt"),
        ("simulation:\n  burn_in_fraction: 0.5\n  fit_window: 0.6\n", "simulation.fit_window"),
        ("reproduce:\n  correlation_span: 0\n", "reproduce.correlation_span"),
    ],
)
def test_invalid_values(tmp_path, text, field):
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, text))
    assert info.value.field == field


def test_malformed_yaml(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, "pair:\n  D: [0.1\n"))
    assert info.value.field == "config"
    assert info.value.line is not None


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_gain_unit_must_be_one(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, "pair:\n  gamma1: 2.0\n"))
    assert info.value.field == "pair.gamma1"
    settings = load_config(write(tmp_path, "units: omega_ex\npair:\n  gamma1: 2.0\n"))
    assert pair_params(settings).gamma1 == 2.0


def test_override_revalidates():
    settings = load_config()
    with pytest.raises(ConfigError):
        settings.override("self_energy.model", "gaussian")


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert load_config().threads == 3
    assert load_config(overrides={"threads": 2}).threads == 2
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ConfigError):
        _ = load_config().threads
    monkeypatch.delenv(THREADS_ENV)
    assert load_config().threads == 1


def test_frequency_scan_defaults():
    settings = load_config()
    assert settings.get("scan.omega2_over_omega_ex") == [0.85, 0.92, 0.96, 1.00, 1.08, 1.12]
    assert settings.get("self_energy.gamma2") == 5e-4


def test_factories(tmp_path):
    settings = load_config()
    assert isinstance(self_energy_model(settings), LorentzianGain)
    assert isinstance(self_energy_model(settings, "markovian"), MarkovianPair)
    assert noise_convention(settings) == NoiseConvention.NOISE_MATRIX
    assert steady_state_method(settings) == SteadyStateMethod.NULL_SPACE


def test_dump_round_trips(tmp_path):
    settings = load_config(overrides={"pair.D": 0.25})
    path = dump_config(settings, tmp_path / "dumped.yaml")
    assert load_config(path).as_dict() == settings.as_dict()
