"""lcsync scan - Detuning scans of the Markovian pair, frequency scans of the non-Markovian one."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from limitcycle_sync.cli.invocation import Invocation
from limitcycle_sync.cli.options import (
    ConfigOption,
    DOption,
    OutDirOption,
    OutputOption,
    SeedOption,
    ThreadsOption,
    common_overrides,
)
from limitcycle_sync.config.factories import self_energy_model
from limitcycle_sync.core.reproduce import detuning_scan, frequency_scan
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import columns_table

app = typer.Typer()

MODES = ("detuning", "frequency")


@app.callback(invoke_without_command=True)
def scan(
    mode: str = typer.Option("detuning", "--mode", help="detuning (sigma_-^2/sigma_0^2 vs Delta/D) or frequency"),
    monte_carlo: bool = typer.Option(False, "--monte-carlo", help="Run a seeded ensemble at every grid point"),
    n_traj: Optional[int] = typer.Option(None, "--n-traj", help="Trajectories per grid point"),
    model: Optional[str] = typer.Option(None, "--model", help="Self-energy model of the frequency scan"),
    D: Optional[float] = DOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Write one CSV per scan; grid points without a synchronized solution stay NaN."""
    if mode not in MODES:
        raise typer.BadParameter(f"must be one of {', '.join(MODES)}", param_hint="--mode")
    overrides = {
        **common_overrides(out_dir=out_dir, seed=seed, threads=threads, output=output),
        "reproduce.n_traj": n_traj,
        "pair.D": D,
        "self_energy.model": model,
    }
    command = ["scan", "--mode", mode]
    if monte_carlo:
        command.append("--monte-carlo")

    with Invocation(command, config, overrides) as inv:
        settings = inv.settings
        tables: dict[str, dict[str, np.ndarray]] = {}
        if mode == "detuning":
            D_value = settings.get("pair.D")
            n_points = len(settings.get("diffusion.delta_over_D"))
            for i, n in enumerate(settings.get("diffusion.photon_numbers")):
                with inv.timed(f"scan_n{n:g}"):
                    tables[f"scan_n{n:g}.csv"] = detuning_scan(
                        settings, float(n), D=D_value, monte_carlo=monte_carlo, seed_index=i * n_points,
                    )
        else:
            with inv.timed("scan_frequency"):
                tables["scan_frequency.csv"] = frequency_scan(settings, self_energy_model(settings), monte_carlo)

        for name, columns in tables.items():
            inv.write_table(name, columns)

        data = {name: {k: v.tolist() for k, v in columns.items()} for name, columns in tables.items()}
        emit(data, inv.format, lambda: [columns_table(name, columns) for name, columns in tables.items()])
