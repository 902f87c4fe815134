"""lcsync simulate - One seeded Langevin trajectory."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np
import typer

from limitcycle_sync.cli.invocation import Invocation
from limitcycle_sync.cli.options import (
    ConfigOption,
    DeltaOption,
    DOption,
    Gamma1Option,
    Gamma2Option,
    OutDirOption,
    OutputOption,
    PhotonsOption,
    SeedOption,
    common_overrides,
    pair_derived,
)
from limitcycle_sync.core.reproduce import system_spec
from limitcycle_sync.core.sde import simulate
from limitcycle_sync.models.trajectory import SystemKind
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import columns_table, kv_panel
from limitcycle_sync.utils.hashing import trajectory_seed

app = typer.Typer()

SystemOption = typer.Option("pair", "--system", help="adler, single or pair")


def step_overrides(dt: Optional[float], T: Optional[float], stride: Optional[int]) -> dict[str, object]:
    return {"simulation.dt": dt, "simulation.T": T, "simulation.stride": stride}


def gamma2_target(kind: SystemKind, model: Optional[str]) -> str:
    """Config key the system reads its two-photon loss from."""
    if kind == SystemKind.SINGLE:
        return "single.gamma2"
    if kind == SystemKind.PAIR and (model or "") != "markovian":
        return "self_energy.gamma2"
    return "pair.gamma2"


def system_derived(kind: SystemKind, delta: Optional[float], photons: Optional[float], model: Optional[str]):
    if kind == SystemKind.SINGLE:
        return pair_derived(None, photons, section="single")
    return pair_derived(delta, photons, gamma2_key=gamma2_target(kind, model))


def parse_system(system: str) -> SystemKind:
    try:
        return SystemKind.from_str(system)
    except ValueError as exc:
        raise typer.BadParameter(str(exc), param_hint="--system") from exc


@app.callback(invoke_without_command=True)
def simulate_cmd(
    system: str = SystemOption,
    dt: Optional[float] = typer.Option(None, "--dt", help="Integration step"),
    T: Optional[float] = typer.Option(None, "--T", help="Total time"),
    stride: Optional[int] = typer.Option(None, "--stride", help="Record every stride-th step"),
    model: Optional[str] = typer.Option(None, "--model", help="Self-energy model of the pair"),
    multiplicative: Optional[bool] = typer.Option(
        None, "--multiplicative/--additive", help="Amplitude-dependent Keldysh noise for the pair",
    ),
    gamma1: Optional[float] = Gamma1Option,
    gamma2: Optional[float] = Gamma2Option,
    D: Optional[float] = DOption,
    delta: Optional[float] = DeltaOption,
    photons: Optional[float] = PhotonsOption,
    seed: Optional[int] = SeedOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Integrate a single trajectory and write its sampled observables."""
    kind = parse_system(system)
    section = "single" if kind == SystemKind.SINGLE else "pair"
    gamma2_key = gamma2_target(kind, model)
    overrides = {
        **common_overrides(out_dir=out_dir, seed=seed, output=output),
        **step_overrides(dt, T, stride),
        f"{section}.gamma1": gamma1,
        gamma2_key: gamma2,
        "pair.D": D,
        "self_energy.model": model,
        "simulation.multiplicative": multiplicative,
    }
    with Invocation(["simulate", "--system", kind.value], config, overrides,
                    derived=system_derived(kind, delta, photons, model)) as inv:
        spec = system_spec(inv.settings, kind)
        if kind == SystemKind.PAIR:
            spec = replace(spec, keep_field=True)
        master = inv.settings.get("seed")
        with inv.timed("integrate"):
            traj = simulate(spec, trajectory_seed(master, 0))

        columns: dict[str, np.ndarray] = {"t": traj.times}
        for name in spec.observables:
            columns[name] = traj.observable(name)
        if traj.phi is not None:
            for m in range(2):
                columns[f"phi{m + 1}_re"] = traj.phi[m].real
                columns[f"phi{m + 1}_im"] = traj.phi[m].imag
        inv.write_table("trajectory.csv", columns)

        final = {name: float(traj.observable(name)[-1]) for name in spec.observables}
        data = {"system": kind.value, "seed": traj.seed, "samples": int(traj.times.size), "final": final,
                "spec": spec.to_dict()}
        summary = {"System": kind.value, "Trajectory seed": str(traj.seed), "Samples": str(traj.times.size),
                   "dt": spec.dt, "T": spec.T}
        summary.update({f"{name}(T)": value for name, value in final.items()})
        emit(data, inv.format, lambda: [kv_panel("Trajectory", summary),
                                        columns_table("Samples", {k: v for k, v in columns.items()
                                                                  if not k.startswith("phi")})])
