"""lcsync diffusion - Effective phase-difference diffusion of the Markovian pair."""

from __future__ import annotations

import math
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
    ThreadsOption,
    common_overrides,
    pair_derived,
)
from limitcycle_sync.config.factories import noise_convention, pair_params
from limitcycle_sync.core.diffusion import diffusion_report, fit_diffusion, reimann_drift
from limitcycle_sync.core.reproduce import adler_spec
from limitcycle_sync.core.sde import run_ensemble
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import diffusion_panel, fits_table

app = typer.Typer()


@app.callback(invoke_without_command=True)
def diffusion(
    convention: Optional[str] = typer.Option(
        None, "--convention", help="Noise normalization: noise-matrix or text",
    ),
    n_traj: Optional[int] = typer.Option(
        None, "--n-traj", help="Trajectories of the Monte Carlo ensemble; implies --monte-carlo",
    ),
    monte_carlo: bool = typer.Option(False, "--monte-carlo", help="Fit the Adler ensemble variance as a cross-check"),
    n_nodes: Optional[int] = typer.Option(None, "--n-nodes", help="Initial quadrature nodes"),
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
    """Quadrature sigma_-^2 against sigma_0^2, optionally checked by an ensemble fit."""
    overrides = {
        **common_overrides(out_dir=out_dir, seed=seed, threads=threads, output=output),
        "diffusion.noise_convention": convention,
        "diffusion.n_nodes": n_nodes,
        "simulation.n_traj": n_traj,
        "pair.gamma1": gamma1,
        "pair.gamma2": gamma2,
        "pair.D": D,
    }
    monte_carlo = monte_carlo or n_traj is not None
    command = ["diffusion", "--monte-carlo"] if monte_carlo else ["diffusion"]
    with Invocation(command, config, overrides, derived=pair_derived(delta, photons)) as inv:
        settings = inv.settings
        params = pair_params(settings)
        fits = {}
        ci = (math.nan, math.nan)
        with inv.timed("quadrature"):
            report = diffusion_report(params, noise_convention(settings), n_nodes=settings.get("diffusion.n_nodes"))
            drift = reimann_drift(params.delta, params.D, report.sigma0_sq, n_nodes=settings.get("diffusion.n_nodes"))
        if monte_carlo:
            sim = settings.section("simulation")
            spec = adler_spec(params, report.sigma0_sq, sim["dt"], sim["T"], sim["stride"], sim["theta_init"])
            with inv.timed("ensemble"):
                stats = run_ensemble(
                    spec, settings.get("simulation.n_traj"), settings.get("seed"),
                    threads=settings.threads, block_size=settings.get("simulation.block_size"),
                    n_boot=settings.get("diffusion.n_boot"),
                )
                fit = fit_diffusion(
                    stats,
                    burn_in_fraction=settings.get("simulation.burn_in_fraction"),
                    window=settings.get("simulation.fit_window"),
                )
            fits["theta_minus"] = fit
            ci = (fit.ci_low / report.sigma0_sq, fit.ci_high / report.sigma0_sq)

        delta_over_D = params.delta / params.D if params.D > 0 else math.nan
        inv.write_table("diffusion.csv", {
            "Delta_over_D": np.array([delta_over_D]),
            "sigma_minus_sq": np.array([report.sigma_minus_sq]),
            "sigma0_sq": np.array([report.sigma0_sq]),
            "ratio": np.array([report.ratio_minus_zero]),
            "ci_low": np.array([ci[0]]),
            "ci_high": np.array([ci[1]]),
        })

        data = {**report.to_dict(), "Delta_over_D": delta_over_D, "drift": drift.value}
        data["fits"] = {name: f.to_dict() for name, f in fits.items()}
        panel = diffusion_panel(report, drift.value)
        emit(data, inv.format, lambda: [panel, fits_table(fits)] if fits else panel)
