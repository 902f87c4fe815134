"""lcsync saddle - Solve the saddle-point equations."""

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
    common_overrides,
    pair_derived,
)
from limitcycle_sync.config.factories import couplings_for, pair_params, self_energy_model, single_params
from limitcycle_sync.core.saddle import saddle_roots, solve_pair_markovian, solve_pair_nonmarkovian, solve_single
from limitcycle_sync.models.params import QuarticCouplings
from limitcycle_sync.models.saddle import NoSync, SaddleSolution
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import nosync_panel, roots_table, saddle_panel, single_panel, stability_table

app = typer.Typer()


def _rows(solutions: list[SaddleSolution]) -> dict[str, np.ndarray]:
    return {
        "nu": np.array([s.nu for s in solutions]),
        "r1": np.array([s.r1 for s in solutions]),
        "r2": np.array([s.r2 for s in solutions]),
        "theta0": np.array([s.theta0 if s.theta0 is not None else math.nan for s in solutions]),
        "residual": np.array([s.residual for s in solutions]),
        "stable": np.array([1.0 if s.stable else 0.0 for s in solutions]),
    }


def _panels(sol: SaddleSolution) -> list:
    if not sol.stability:
        return [saddle_panel(sol)]
    return [saddle_panel(sol), stability_table(sol.stability)]


@app.callback(invoke_without_command=True)
def saddle(
    pair: bool = typer.Option(True, "--pair/--single", help="Two coupled oscillators or a single one"),
    nonmarkovian: bool = typer.Option(
        False, "--nonmarkovian", help="Use the configured frequency-dependent self-energy instead of the closed form",
    ),
    all_roots: bool = typer.Option(False, "--all-roots", help="List every converged root with its stability"),
    model: Optional[str] = typer.Option(None, "--model", help="Self-energy model: markovian, lorentzian, tabulated"),
    gamma1: Optional[float] = Gamma1Option,
    gamma2: Optional[float] = Gamma2Option,
    D: Optional[float] = DOption,
    delta: Optional[float] = DeltaOption,
    photons: Optional[float] = PhotonsOption,
    omega1: Optional[float] = typer.Option(None, "--omega1", help="Bare frequency of oscillator 1"),
    omega2: Optional[float] = typer.Option(None, "--omega2", help="Bare frequency of oscillator 2"),
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Limit-cycle frequency, radii and locking phase."""
    section = "pair" if pair else "single"
    uses_self_energy = pair and nonmarkovian and (model or "") != "markovian"
    overrides = {
        **common_overrides(out_dir=out_dir, output=output),
        f"{section}.gamma1": gamma1,
        "self_energy.gamma2" if uses_self_energy else f"{section}.gamma2": gamma2,
        "pair.D": D,
        "pair.omega1": omega1,
        "pair.omega2": omega2,
        "self_energy.model": model,
    }
    command = ["saddle", "--pair" if pair else "--single"]
    if nonmarkovian:
        command.append("--nonmarkovian")
    if all_roots:
        command.append("--all-roots")

    derived = pair_derived(
        delta, photons, section=section, gamma2_key="self_energy.gamma2" if uses_self_energy else None,
    )
    with Invocation(command, config, overrides, derived=derived) as inv:
        settings = inv.settings
        if not pair:
            params = single_params(settings)
            nu, r = solve_single(params, QuarticCouplings.stuart_landau(params.gamma2))
            inv.write_table("saddle.csv", {"nu": np.array([nu]), "r": np.array([r])})
            emit({"nu": nu, "r": r, "r_sq": r * r}, inv.format, lambda: single_panel(nu, r))
            return

        if not nonmarkovian:
            sol = solve_pair_markovian(pair_params(settings))
            inv.write_table("saddle.csv", _rows([sol]))
            emit(sol.to_dict(), inv.format, lambda: _panels(sol))
            return

        params = pair_params(settings)
        se_model = self_energy_model(settings)
        couplings = couplings_for(settings)
        n_starts = settings.get("self_energy.n_starts")
        if all_roots:
            roots, starts = saddle_roots(se_model, params.omega1, params.omega2, couplings, n_starts=n_starts)
            inv.write_table("saddle.csv", _rows(list(roots)))
            emit({"starts": starts, "roots": [r.to_dict() for r in roots]}, inv.format, lambda: roots_table(roots))
            return
        result = solve_pair_nonmarkovian(se_model, params.omega1, params.omega2, couplings, n_starts=n_starts)
        if isinstance(result, NoSync):
            inv.write_table("saddle.csv", _rows([]))
            emit(result.to_dict(), inv.format, lambda: nosync_panel(result))
            return
        inv.write_table("saddle.csv", _rows([result]))
        emit(result.to_dict(), inv.format, lambda: _panels(result))
