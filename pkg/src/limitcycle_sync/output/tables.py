"""Rich table builders for each command."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

import numpy as np
from rich.panel import Panel
from rich.table import Table

from limitcycle_sync.models.diffusion import DiffusionFit, DiffusionReport
from limitcycle_sync.models.distribution import PhaseDistribution
from limitcycle_sync.models.lindblad import DensityMatrix
from limitcycle_sync.models.manifest import RunManifest, VerifyReport
from limitcycle_sync.models.saddle import NoSync, SaddleSolution
from limitcycle_sync.models.trajectory import EnsembleStats
from limitcycle_sync.output.themes import styled_branch, styled_check, styled_flag


def fmt(value: Any, digits: int = 6) -> str:
    if value is None:
        return "-"
    if isinstance(value, (complex, np.complexfloating)):
        return f"{value.real:.{digits}g}{value.imag:+.{digits}g}i"
    if isinstance(value, (float, np.floating)):
        return f"{value:.{digits}g}"
    return str(value)


def kv_panel(title: str, rows: Mapping[str, Any], border: str = "blue") -> Panel:
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Key", style="bold cyan", no_wrap=True)
    table.add_column("Value")
    for key, value in rows.items():
        table.add_row(key, value if isinstance(value, str) else fmt(value))
    return Panel(table, title=f"[bold]{title}[/bold]", border_style=border)


def saddle_panel(sol: SaddleSolution, title: str = "Saddle point") -> Panel:
    rows: dict[str, Any] = {
        "Branch": styled_branch(sol.branch),
        "nu": sol.nu,
        "r1": sol.r1,
        "r2": sol.r2,
        "r^2": sol.r1 * sol.r2,
        "theta0": sol.theta0,
        "Residual": sol.residual,
    }
    if sol.stability:
        rows["Stable"] = styled_flag(sol.stable)
        rows["Zero modes"] = str(sol.zero_modes)
    if sol.omegas:
        rows["omega1, omega2"] = f"{fmt(sol.omegas[0])}, {fmt(sol.omegas[1])}"
    return kv_panel(title, rows, border="green" if sol.synchronized else "yellow")


def single_panel(nu: float, r: float) -> Panel:
    return kv_panel("Single oscillator", {"nu": nu, "r": r, "r^2": r * r, "n = r^2/2": r * r / 2.0})


def nosync_panel(result: NoSync) -> Panel:
    return kv_panel(
        "Saddle point",
        {
            "Branch": styled_branch(None),
            "Starts tried": str(result.starts),
            "Converged roots": str(result.converged),
            "Reason": result.reason,
        },
        border="red",
    )


def stability_table(eigenvalues: tuple[complex, ...]) -> Table:
    table = Table(title="Linear stability", expand=False)
    table.add_column("#", justify="right", style="dim")
    table.add_column("Re", justify="right")
    table.add_column("Im", justify="right")
    for i, ev in enumerate(sorted(eigenvalues, key=lambda e: e.real, reverse=True)):
        color = "red" if ev.real > 1e-9 else "green"
        table.add_row(str(i), f"[{color}]{ev.real:.6g}[/{color}]", f"{ev.imag:.6g}")
    return table


def roots_table(roots: tuple[SaddleSolution, ...] | list[SaddleSolution]) -> Table:
    table = Table(title="Converged roots", expand=True)
    table.add_column("nu", justify="right", style="bold")
    table.add_column("r1", justify="right")
    table.add_column("r2", justify="right")
    table.add_column("theta0", justify="right")
    table.add_column("Residual", justify="right", style="dim")
    table.add_column("Stable", no_wrap=True)
    for r in roots:
        table.add_row(fmt(r.nu), fmt(r.r1), fmt(r.r2), fmt(r.theta0), fmt(r.residual, 3), styled_flag(r.stable))
    return table


def ensemble_table(stats: EnsembleStats) -> Table:
    table = Table(title=f"Ensemble ({stats.n_traj} trajectories, seed {stats.master_seed})", expand=False)
    table.add_column("Observable", style="cyan")
    table.add_column("Final mean", justify="right")
    table.add_column("Final variance", justify="right")
    table.add_column("Std. error", justify="right", style="dim")
    for name in stats.observables:
        table.add_row(
            name, fmt(stats.mean[name][-1]), fmt(stats.var[name][-1]), fmt(stats.std_error(name)[-1]),
        )
    return table


def fits_table(fits: Mapping[str, DiffusionFit]) -> Table:
    table = Table(title="Diffusion fits (slope / 2)", expand=False)
    table.add_column("Observable", style="cyan")
    table.add_column("sigma^2", justify="right", style="bold")
    table.add_column("CI", justify="right")
    table.add_column("R^2", justify="right", style="dim")
    table.add_column("Points", justify="right", style="dim")
    for name, fit in fits.items():
        table.add_row(name, fmt(fit.sigma_sq), f"[{fmt(fit.ci_low, 4)}, {fmt(fit.ci_high, 4)}]",
                      fmt(fit.r_squared, 4), str(fit.n_points))
    return table


def distribution_table(reference: PhaseDistribution, others: Mapping[str, PhaseDistribution]) -> Table:
    table = Table(title="Phase distributions", expand=False)
    table.add_column("Method", style="cyan")
    table.add_column("Bins", justify="right", style="dim")
    table.add_column("Mode", justify="right")
    table.add_column("Total", justify="right", style="dim")
    table.add_column(f"L1 vs {reference.method}", justify="right")
    table.add_column(f"Linf vs {reference.method}", justify="right")
    table.add_row(reference.method, str(reference.n_bins), fmt(reference.mode, 4), fmt(reference.total, 8), "-", "-")
    for name, dist in others.items():
        table.add_row(
            name, str(dist.n_bins), fmt(dist.mode, 4), fmt(dist.total, 8),
            fmt(reference.l1_distance(dist), 3), fmt(reference.linf_distance(dist), 3),
        )
    return table


def diffusion_panel(report: DiffusionReport, drift: float | None = None) -> Panel:
    rows: dict[str, Any] = {
        "Convention": report.convention.value,
        "sigma_-^2": report.sigma_minus_sq,
        "sigma_+^2": report.sigma_plus_sq,
        "sigma_0^2": report.sigma0_sq,
        "sigma_-^2 / sigma_0^2": report.ratio_minus_zero,
        "sigma_-^2 / sigma_+^2": report.ratio_minus_plus,
        "Quadrature rel. error": report.quadrature_error,
    }
    if drift is not None:
        rows["Drift <dtheta_-/dt>"] = drift
    if report.underflow:
        rows["Underflow"] = "[yellow]yes (deep locking, value clamped)[/yellow]"
    return kv_panel("Effective phase diffusion", rows)


def columns_table(title: str, columns: Mapping[str, np.ndarray], max_rows: int = 40) -> Table:
    names = list(columns)
    table = Table(title=title, expand=False)
    for name in names:
        table.add_column(name, justify="right")
    n = len(next(iter(columns.values()))) if columns else 0
    step = max(1, int(np.ceil(n / max_rows)))
    for i in range(0, n, step):
        table.add_row(*(fmt(columns[c][i], 5) for c in names))
    if step > 1:
        table.caption = f"every {step}th of {n} rows"
    return table


def lindblad_panel(rho: DensityMatrix) -> Panel:
    n1, n2 = rho.mean_photon_numbers()
    return kv_panel(
        "Lindblad steady state",
        {
            "Cutoff": str(rho.space.cutoff),
            "Method": rho.method,
            "Residual": rho.residual,
            "Trace": rho.trace.real,
            "Hermiticity error": rho.hermiticity_error,
            "Min eigenvalue": rho.meta.get("min_eigenvalue"),
            "Population at cutoff": rho.meta.get("boundary_population"),
            "<n1>, <n2>": f"{fmt(n1)}, {fmt(n2)}",
        },
    )


def outputs_table(manifest: RunManifest) -> Table:
    table = Table(title="Written files", expand=False)
    table.add_column("File", style="cyan")
    table.add_column("Bytes", justify="right", style="dim")
    table.add_column("SHA-256", style="dim", no_wrap=True)
    for item in manifest.outputs:
        table.add_row(item.path, str(item.size), item.sha256[:16])
    return table


def verify_table(report: VerifyReport) -> Table:
    table = Table(title=f"Verify: {' '.join(report.command)}", expand=True)
    table.add_column("File", style="cyan")
    table.add_column("Status", no_wrap=True)
    table.add_column("Expected", style="dim", no_wrap=True)
    table.add_column("Actual", style="dim", no_wrap=True)
    for check in report.checks:
        table.add_row(check.path, styled_check(check.status), check.expected[:16], check.actual[:16])
    return table
