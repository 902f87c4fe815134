"""lcsync reproduce <target> - Data behind each figure panel."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

import typer

from limitcycle_sync.cli.invocation import Invocation
from limitcycle_sync.cli.options import (
    ConfigOption,
    OutDirOption,
    OutputOption,
    SeedOption,
    ThreadsOption,
    common_overrides,
)
from limitcycle_sync.core.reproduce import TARGETS, run_target
from limitcycle_sync.output.formatters import emit
from limitcycle_sync.output.tables import kv_panel, outputs_table

app = typer.Typer()


@app.callback(invoke_without_command=True)
def reproduce(
    target: str = typer.Argument(help=f"One of {', '.join(TARGETS)} or all"),
    n_traj: Optional[int] = typer.Option(None, "--n-traj", help="Trajectories per ensemble"),
    monte_carlo: Optional[bool] = typer.Option(
        None, "--monte-carlo/--no-monte-carlo", help="Run the Monte Carlo ensembles of each target",
    ),
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    output: Optional[str] = OutputOption,
    config: Optional[Path] = ConfigOption,
    out_dir: Optional[Path] = OutDirOption,
) -> None:
    """Write the CSV tables and a matplotlib script for one target, or for all of them."""
    if target != "all" and target not in TARGETS:
        raise typer.BadParameter(f"must be one of {', '.join(TARGETS)} or all", param_hint="TARGET")
    overrides = {
        **common_overrides(out_dir=out_dir, seed=seed, threads=threads, output=output),
        "reproduce.n_traj": n_traj,
        "reproduce.monte_carlo": monte_carlo,
    }
    names = TARGETS if target == "all" else (target,)
    with Invocation(["reproduce", target], config, overrides) as inv:
        results: dict[str, dict[str, Any]] = {}
        for name in names:
            with inv.timed(name):
                results[name] = run_target(name, inv.settings, inv)

        data = {
            "targets": results,
            "outputs": [item.to_dict() for item in inv.manifest.outputs],
            "out_dir": str(inv.out_dir),
        }
        emit(data, inv.format, lambda: [*(kv_panel(name, summary) for name, summary in results.items()),
                                        outputs_table(inv.manifest)])
