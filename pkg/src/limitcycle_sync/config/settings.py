"""Layered run configuration: defaults < YAML file < command-line flags."""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from limitcycle_sync.core.errors import ConfigError

THREADS_ENV = "LCSYNC_THREADS"
UNITS = ("gamma1", "omega_ex")
SELF_ENERGY_MODELS = ("markovian", "lorentzian", "tabulated")

# Fields whose default is None accept these types.
OPTIONAL_TYPES: dict[str, tuple[type, ...]] = {
    "threads": (int,),
    "lindblad.cutoff": (int,),
    "self_energy.file": (str,),
    "fokker_planck.sigma0_sq": (float, int),
}

DEFAULTS: dict[str, Any] = {
    "units": "gamma1",
    "seed": 0,
    "threads": None,
    "single": {"omega0": 1.0, "gamma1": 1.0, "gamma2": 0.1},
    "pair": {"omega1": 1.0, "omega2": 1.0, "gamma1": 1.0, "gamma2": 0.1, "D": 0.1},
    "simulation": {
        "dt": 1e-3,
        "T": 200.0,
        "stride": 100,
        "n_traj": 400,
        "block_size": 64,
        "burn_in_fraction": 0.2,
        "fit_window": 0.6,
        "theta_init": 3.141592653589793,
        "multiplicative": False,
    },
    "fokker_planck": {"n_harmonics": 128, "n_bins": 512, "n_grid": 2048, "sigma0_sq": None},
    "diffusion": {
        "noise_convention": "noise-matrix",
        "n_nodes": 512,
        "photon_numbers": [5.0, 10.0, 100.0],
        "delta_over_D": [0.0, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 5.0, 10.0, 20.0],
        "n_bins": 64,
        "n_boot": 200,
    },
    "lindblad": {"cutoff": None, "method": "nullspace", "tol": 1e-9, "n_bins": 64},
    "self_energy": {
        "model": "lorentzian",
        "omega_ex": 1.0,
        "width": 0.05,
        "gain_strength": 0.01,
        "background_loss": 0.005,
        "cross_sign": 1,
        "kappa_extra": 0.3,
        "gamma2": 5e-4,
        "file": None,
        "interpolation": "pchip",
        "n_starts": 9,
    },
    "scan": {
        "omega2_over_omega_ex": [0.85, 0.92, 0.96, 1.00, 1.08, 1.12],
        "omega1_span": 0.03,
        "omega1_points": 13,
    },
    "reproduce": {
        "n_traj": 100,
        "dt": 0.01,
        "T": 200.0,
        "stride": 10,
        "n_paths": 5,
        "cutoff": 20,
        "s2_cutoff": 30,
        "nonmarkovian_dt": 0.05,
        "nonmarkovian_T": 2000.0,
        "correlation_dt": 0.25,
        "correlation_span": 4.0,
        "monte_carlo": True,
        "inset_D": 0.9,
    },
    "output": {"dir": "out", "format": "table"},
}


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"must be an integer, got {raw!r}", field=THREADS_ENV)
    if value < 1:
        raise ConfigError(f"must be >= 1, got {value}", field=THREADS_ENV)
    return value


def _line_map(node: yaml.Node | None, prefix: str = "", lines: dict[str, int] | None = None) -> dict[str, int]:
    """Dotted key path -> 1-based line of each mapping entry in the composed tree."""
    lines = {} if lines is None else lines
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[path] = key_node.start_mark.line + 1
            _line_map(value_node, path, lines)
    return lines


def _type_ok(value: Any, default: Any, path: str) -> bool:
    if default is None:
        return value is None or isinstance(value, OPTIONAL_TYPES.get(path, (object,)))
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, list):
        return isinstance(value, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        )
    return isinstance(value, type(default))


def _merge(base: dict[str, Any], layer: dict[str, Any], lines: dict[str, int], prefix: str = "") -> None:
    for key, value in layer.items():
        path = f"{prefix}.{key}" if prefix else str(key)
        if key not in base:
            raise ConfigError("unknown key", field=path, line=lines.get(path))
        default = base[key]
        if isinstance(default, dict):
            if not isinstance(value, dict):
                raise ConfigError("expected a mapping", field=path, line=lines.get(path))
            _merge(default, value, lines, path)
            continue
        if not _type_ok(value, DEFAULTS_FLAT.get(path), path):
            raise ConfigError(
                f"expected {type(DEFAULTS_FLAT.get(path)).__name__}, got {type(value).__name__}",
                field=path,
                line=lines.get(path),
            )
        base[key] = float(value) if isinstance(DEFAULTS_FLAT.get(path), float) else value


def _flatten(tree: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in tree.items():
        path = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            flat.update(_flatten(value, path))
        else:
            flat[path] = value
    return flat


DEFAULTS_FLAT = _flatten(DEFAULTS)


@dataclass
class Settings:
    values: dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS))
    source: Path | None = None
    lines: dict[str, int] = field(default_factory=dict)

    def get(self, path: str) -> Any:
        node: Any = self.values
        for part in path.split("."):
            node = node[part]
        return node

    def section(self, name: str) -> dict[str, Any]:
        return self.values[name]

    def override(self, path: str, value: Any) -> None:
        """Apply one command-line flag; ``None`` means the flag was not given."""
        if value is None:
            return
        parts = path.split(".")
        layer: dict[str, Any] = {}
        cursor = layer
        for part in parts[:-1]:
            cursor = cursor.setdefault(part, {})
        cursor[parts[-1]] = value
        _merge(self.values, layer, {}, "")
        self.validate()

    def apply(self, overrides: dict[str, Any]) -> Settings:
        for path, value in overrides.items():
            self.override(path, value)
        return self

    @property
    def threads(self) -> int:
        value = self.values["threads"]
        return int(value) if value is not None else default_threads()

    @property
    def out_dir(self) -> Path:
        return Path(self.values["output"]["dir"])

    def as_dict(self) -> dict[str, Any]:
        return copy.deepcopy(self.values)

    def validate(self) -> None:
        v = self.values
        if v["units"] not in UNITS:
            self._fail("units", f"must be one of {', '.join(UNITS)}")
        if v["units"] == "gamma1":
            for path in ("single.gamma1", "pair.gamma1"):
                if self.get(path) != 1.0:
                    self._fail(path, "must be 1 when units are gamma1")
        if v["units"] == "omega_ex" and self.get("self_energy.omega_ex") != 1.0:
            self._fail("self_energy.omega_ex", "must be 1 when units are omega_ex")
        if v["self_energy"]["model"] not in SELF_ENERGY_MODELS:
            self._fail("self_energy.model", f"must be one of {', '.join(SELF_ENERGY_MODELS)}")
        if v["self_energy"]["model"] == "tabulated" and not v["self_energy"]["file"]:
            self._fail("self_energy.file", "required for the tabulated model")
        if v["lindblad"]["method"] not in ("nullspace", "propagation"):
            self._fail("lindblad.method", "must be nullspace or propagation")
        if v["diffusion"]["noise_convention"] not in ("noise-matrix", "text"):
            self._fail("diffusion.noise_convention", "must be noise-matrix or text")
        if v["output"]["format"] not in ("table", "json", "yaml"):
            self._fail("output.format", "must be table, json or yaml")
        for path in ("simulation.dt", "simulation.T", "reproduce.dt", "reproduce.T", "reproduce.correlation_dt",
                     "reproduce.correlation_span", "lindblad.tol"):
            if not self.get(path) > 0:
                self._fail(path, "must be > 0")
        for path in ("simulation.burn_in_fraction", "simulation.fit_window"):
            if not 0.0 <= self.get(path) < 1.0:
                self._fail(path, "must lie in [0, 1)")
        if v["simulation"]["burn_in_fraction"] + v["simulation"]["fit_window"] > 1.0:
            self._fail("simulation.fit_window", "must fit in the record after the burn-in")
        if v["threads"] is not None and v["threads"] < 1:
            self._fail("threads", "must be >= 1")

    def _fail(self, path: str, message: str) -> None:
        raise ConfigError(message, field=path, line=self.lines.get(path))


def load_config(path: Path | str | None = None, overrides: dict[str, Any] | None = None) -> Settings:
    """Resolve defaults, then the YAML file, then flag overrides."""
    settings = Settings()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"configuration file not found: {path}", field="config")
        text = path.read_text(encoding="utf-8")
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(str(getattr(exc, "problem", exc)), field="config",
                              line=mark.line + 1 if mark is not None else None)
        settings.source = path
        settings.lines = _line_map(node)
        if data is not None:
            if not isinstance(data, dict):
                raise ConfigError("top level must be a mapping", field="config", line=1)
            _merge(settings.values, data, settings.lines)
    settings.validate()
    if overrides:
        settings.apply(overrides)
    return settings


def dump_config(settings: Settings, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(settings.as_dict(), sort_keys=False), encoding="utf-8")
    return path
