"""lcsync fp - Stationary phase-difference distribution of the noisy Adler equation."""

from __future__ import annotations

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
    common_overrides,
    pair_derived,
)
from limitcycle_sync.config.factories import noise_convention, pair_params
from limitcycle_sync.core.diffusion import markovian_noise_levels
from limitcycle_sync.core.fokker_planck import (
    boltzmann_density,
    liouvillian_branch,
    stationary_adler_cf,
    stationary_adler_grid,
)
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import distribution_table, kv_panel

app = typer.Typer()

BRANCH_MODES = (1, 2, 3)


@app.callback(invoke_without_command=True)
def fp(
    sigma0_sq: Optional[float] = typer.Option(
        None, "--sigma0-sq", help="Phase-difference noise level (default: from the pair's noise matrix)",
    ),
    n_harmonics: Optional[int] = typer.Option(None, "--n-harmonics", help="Fourier harmonics of the continued fraction"),
    n_bins: Optional[int] = typer.Option(None, "--n-bins", help="Grid points of the written density"),
    n_grid: Optional[int] = typer.Option(None, "--n-grid", help="Cells of the finite-volume cross-check"),
    gamma1: Optional[float] = Gamma1Option,
    gamma2: Optional[float] = Gamma2Option,
    D: Optional[float] = DOption,
    delta: Optional[float] = DeltaOption,
    photons: Optional[float] = PhotonsOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Continued-fraction density, cross-checked against the grid solver."""
    overrides = {
        **common_overrides(out_dir=out_dir, output=output),
        "fokker_planck.sigma0_sq": sigma0_sq,
        "fokker_planck.n_harmonics": n_harmonics,
        "fokker_planck.n_bins": n_bins,
        "fokker_planck.n_grid": n_grid,
        "pair.gamma1": gamma1,
        "pair.gamma2": gamma2,
        "pair.D": D,
    }
    with Invocation(["fp"], config, overrides, derived=pair_derived(delta, photons)) as inv:
        settings = inv.settings
        fps = settings.section("fokker_planck")
        params = pair_params(settings)
        s = fps["sigma0_sq"]
        if s is None:
            _, s = markovian_noise_levels(params, noise_convention(settings))
        s = float(s)

        with inv.timed("continued_fraction"):
            dist = stationary_adler_cf(params.delta, params.D, s, fps["n_harmonics"], fps["n_bins"])
        with inv.timed("grid"):
            grid = stationary_adler_grid(params.delta, params.D, s, fps["n_grid"])
            on_grid = stationary_adler_cf(params.delta, params.D, s, fps["n_harmonics"], fps["n_grid"])
        inv.write_table("fp.csv", {"theta": dist.grid, "density": dist.density})

        checks: dict[str, float | None] = {"linf_vs_grid": on_grid.linf_distance(grid), "boltzmann_linf": None}
        if params.delta == 0:
            exact = boltzmann_density(params.D, s, dist.grid)
            checks["boltzmann_linf"] = float(np.max(np.abs(dist.density - exact)))
        gamma2_single = settings.get("single.gamma2")
        branch = {f"l={l}": liouvillian_branch(gamma2_single, l) for l in BRANCH_MODES}

        data = {
            "Delta": params.delta,
            "D": params.D,
            "sigma0_sq": s,
            "mode": dist.mode,
            "total": dist.total,
            "checks": checks,
            "liouvillian_branch": {"gamma2": gamma2_single, **branch},
        }
        summary = {"Delta": params.delta, "D": params.D, "sigma0^2": s, **checks}
        summary.update({f"lambda_{key} (gamma2={gamma2_single:g})": value for key, value in branch.items()})
        emit(data, inv.format, lambda: [kv_panel("Stationary Adler distribution", summary),
                                        distribution_table(on_grid, {grid.method: grid})])
