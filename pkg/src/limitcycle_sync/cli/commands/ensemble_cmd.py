"""lcsync ensemble - Seeded trajectory ensemble with diffusion fits."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import typer

from limitcycle_sync.cli.commands.simulate_cmd import (
    SystemOption,
    gamma2_target,
    parse_system,
    step_overrides,
    system_derived,
)
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
    ThreadsOption,
    common_overrides,
)
from limitcycle_sync.core.diffusion import fit_diffusion
from limitcycle_sync.core.errors import InsufficientData
from limitcycle_sync.core.reproduce import system_spec
from limitcycle_sync.core.sde import run_ensemble
from limitcycle_sync.models.diffusion import DiffusionFit
from limitcycle_sync.models.trajectory import EnsembleStats, SystemKind
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import ensemble_table, fits_table

logger = logging.getLogger(__name__)

app = typer.Typer()

PHASE_OBSERVABLES = {
    SystemKind.ADLER: ("theta_minus",),
    SystemKind.SINGLE: ("theta",),
    SystemKind.PAIR: ("theta_plus", "theta_minus"),
}


def ensemble_columns(stats: EnsembleStats) -> dict[str, np.ndarray]:
    columns: dict[str, np.ndarray] = {"t": stats.times}
    for name in stats.observables:
        columns[f"{name}_mean"] = stats.mean[name]
        columns[f"{name}_var"] = stats.var[name]
    return columns


def phase_fits(stats: EnsembleStats, kind: SystemKind, fit_options: dict) -> dict[str, DiffusionFit]:
    fits: dict[str, DiffusionFit] = {}
    for name in PHASE_OBSERVABLES[kind]:
        try:
            fits[name] = fit_diffusion(stats, observable=name, **fit_options)
        except InsufficientData as exc:
            logger.warning("no diffusion fit for %s: %s", name, exc)
    return fits


@app.callback(invoke_without_command=True)
def ensemble(
    system: str = SystemOption,
    n_traj: Optional[int] = typer.Option(None, "--n-traj", help="Number of trajectories"),
    dt: Optional[float] = typer.Option(None, "--dt", help="Integration step"),
    T: Optional[float] = typer.Option(None, "--T", help="Total time"),
    stride: Optional[int] = typer.Option(None, "--stride", help="Record every stride-th step"),
    model: Optional[str] = typer.Option(None, "--model", help="Self-energy model of the pair"),
    gamma1: Optional[float] = Gamma1Option,
    gamma2: Optional[float] = Gamma2Option,
    D: Optional[float] = DOption,
    delta: Optional[float] = DeltaOption,
    photons: Optional[float] = PhotonsOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Mean and variance of each observable over seeded trajectories."""
    kind = parse_system(system)
    section = "single" if kind == SystemKind.SINGLE else "pair"
    overrides = {
        **common_overrides(out_dir=out_dir, seed=seed, threads=threads, output=output),
        **step_overrides(dt, T, stride),
        "simulation.n_traj": n_traj,
        f"{section}.gamma1": gamma1,
        gamma2_target(kind, model): gamma2,
        "pair.D": D,
        "self_energy.model": model,
    }
    with Invocation(["ensemble", "--system", kind.value], config, overrides,
                    derived=system_derived(kind, delta, photons, model)) as inv:
        settings = inv.settings
        spec = system_spec(settings, kind)
        with inv.timed("integrate"):
            stats = run_ensemble(
                spec,
                settings.get("simulation.n_traj"),
                settings.get("seed"),
                threads=settings.threads,
                block_size=settings.get("simulation.block_size"),
                n_boot=settings.get("diffusion.n_boot"),
            )
        inv.write_table("ensemble.csv", ensemble_columns(stats))

        fit_options = {
            "burn_in_fraction": settings.get("simulation.burn_in_fraction"),
            "window": settings.get("simulation.fit_window"),
        }
        with inv.timed("fit"):
            fits = phase_fits(stats, kind, fit_options)

        data = {
            "system": kind.value,
            "n_traj": stats.n_traj,
            "master_seed": stats.master_seed,
            "final": {name: {"mean": stats.mean[name][-1], "var": stats.var[name][-1]} for name in stats.observables},
            "fits": {name: fit.to_dict() for name, fit in fits.items()},
        }
        emit(data, inv.format, lambda: [ensemble_table(stats), fits_table(fits)] if fits else ensemble_table(stats))
