"""lcsync lindblad - Two-mode master-equation steady state."""

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
from limitcycle_sync.config.factories import pair_params, steady_state_method
from limitcycle_sync.core.lindblad import (
    build_liouvillian,
    number_distribution,
    phase_distribution_grid,
    phase_distribution_lme,
    steady_state,
)
from limitcycle_sync.models.lindblad import FockSpace
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import distribution_table, lindblad_panel

app = typer.Typer()


@app.callback(invoke_without_command=True)
def lindblad(
    cutoff: Optional[int] = typer.Option(None, "--cutoff", help="Fock states per mode (default from n)"),
    method: Optional[str] = typer.Option(None, "--method", help="nullspace or propagation"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Relative steady-state residual"),
    n_bins: Optional[int] = typer.Option(None, "--n-bins", help="Bins of the phase distribution"),
    gamma1: Optional[float] = Gamma1Option,
    gamma2: Optional[float] = Gamma2Option,
    D: Optional[float] = DOption,
    delta: Optional[float] = DeltaOption,
    photons: Optional[float] = PhotonsOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Steady state, phase-difference distribution and photon statistics."""
    overrides = {
        **common_overrides(out_dir=out_dir, output=output),
        "lindblad.cutoff": cutoff,
        "lindblad.method": method,
        "lindblad.tol": tol,
        "lindblad.n_bins": n_bins,
        "pair.gamma1": gamma1,
        "pair.gamma2": gamma2,
        "pair.D": D,
    }
    with Invocation(["lindblad"], config, overrides, derived=pair_derived(delta, photons)) as inv:
        settings = inv.settings
        lb = settings.section("lindblad")
        params = pair_params(settings)
        space = FockSpace(lb["cutoff"]) if lb["cutoff"] else FockSpace.default_for(params)
        with inv.timed("liouvillian"):
            lv = build_liouvillian(params, space)
        with inv.timed("steady_state"):
            rho = steady_state(lv, steady_state_method(settings), tol=lb["tol"])
        lme = phase_distribution_lme(rho, lb["n_bins"])
        grid = phase_distribution_grid(rho, lb["n_bins"])
        numbers = number_distribution(rho)

        inv.write_table("lindblad_phase.csv", {"theta": lme.grid, "density": lme.density, "density_grid": grid.density})
        inv.write_table("lindblad_numbers.csv", {k: numbers[k] for k in ("n", "mode1", "mode2")})
        inv.write_table("lindblad_total.csv", {"n_total": np.arange(numbers["total"].size), "total": numbers["total"]})

        n1, n2 = rho.mean_photon_numbers()
        data = {
            "cutoff": space.cutoff,
            "method": rho.method,
            "residual": rho.residual,
            "mean_photons": [n1, n2],
            "min_eigenvalue": rho.meta.get("min_eigenvalue"),
            "boundary_population": rho.meta.get("boundary_population"),
            "phase_mode": lme.mode,
            "fourier_vs_grid_linf": lme.linf_distance(grid),
        }
        emit(data, inv.format, lambda: [lindblad_panel(rho), distribution_table(lme, {grid.method: grid})])
