"""Figure-data targets and the parameter scans behind them.

Every target writes CSV tables plus a small matplotlib script through an
``OutputSink``; numbers depend only on the configuration and the seed.
"""

from __future__ import annotations

import contextlib
import logging
import math
from collections.abc import Callable, Iterator
from pathlib import Path
from typing import Any, Protocol

import numpy as np

from limitcycle_sync.config.factories import (
    couplings_for,
    noise_convention,
    pair_params,
    self_energy_model,
    single_params,
    steady_state_method,
)
from limitcycle_sync.config.settings import Settings
from limitcycle_sync.core.diffusion import (
    diffusion_report,
    fit_diffusion,
    markovian_noise_levels,
    phase_correlation_time,
    projected_noise_variances,
    reimann_sigma_minus,
    wrapped_histogram,
)
from limitcycle_sync.core.errors import CutoffDominated, CutoffTooSmall, InvalidParameters, SyncError
from limitcycle_sync.core.fokker_planck import stationary_adler_cf, stationary_adler_grid
from limitcycle_sync.core.lindblad import build_liouvillian, phase_distribution_lme, steady_state
from limitcycle_sync.core.saddle import solve_pair_markovian, solve_pair_nonmarkovian
from limitcycle_sync.core.sde import autocorrelation, fit_correlation_time, run_ensemble
from limitcycle_sync.core.self_energy import eval_self_energy
from limitcycle_sync.models.lindblad import FockSpace
from limitcycle_sync.models.params import PairParams, QuarticCouplings
from limitcycle_sync.models.saddle import NoSync, SaddleSolution
from limitcycle_sync.models.self_energy import MarkovianPair, SelfEnergyModel, Tabulated
from limitcycle_sync.models.trajectory import SimulationSpec, SystemKind
from limitcycle_sync.utils.hashing import trajectory_seed

logger = logging.getLogger(__name__)

TARGETS = ("fig1", "fig2", "fig3", "fig4", "fig5", "s1", "s2")

# Physical parameters fixed by each figure; counts and cutoffs come from the config.
FIG1_PHOTONS = 5.0
FIG2_PHOTONS = 10.0
FIG2_DELTA_OVER_D = 0.13
MARKOVIAN_D = 0.1
INSET_D_POINTS = 9
SELF_ENERGY_POINTS = 601
SELF_ENERGY_HALF_SPAN = 0.3


class OutputSink(Protocol):
    def write_table(self, name: str, columns: dict[str, np.ndarray]) -> Path: ...

    def write_text(self, name: str, text: str) -> Path: ...

    def timed(self, stage: str) -> contextlib.AbstractContextManager[None]: ...


class MemorySink:
    """Collects tables in memory; used by library callers and tests."""

    def __init__(self) -> None:
        self.tables: dict[str, dict[str, np.ndarray]] = {}
        self.texts: dict[str, str] = {}

    def write_table(self, name: str, columns: dict[str, np.ndarray]) -> Path:
        self.tables[name] = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
        return Path(name)

    def write_text(self, name: str, text: str) -> Path:
        self.texts[name] = text
        return Path(name)

    @contextlib.contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        yield


# ---------------------------------------------------------------------------
# shared building blocks
# ---------------------------------------------------------------------------

def markovian_pair(n: float, D: float, delta_over_D: float, gamma1: float = 1.0) -> PairParams:
    return PairParams.from_photon_number(n, D=D, delta=delta_over_D * D, gamma1=gamma1)


def adler_spec(params: PairParams, sigma0_sq: float, dt: float, T: float, stride: int, theta_init: float) -> SimulationSpec:
    return SimulationSpec(
        kind=SystemKind.ADLER, dt=dt, T=T, stride=stride,
        delta=params.delta, D=params.D, sigma0_sq=sigma0_sq, theta_init=theta_init,
    )


def pair_spec(
    model: SelfEnergyModel, sol: SaddleSolution, couplings: QuarticCouplings, settings: Settings,
    dt: float, T: float, stride: int,
) -> SimulationSpec:
    return SimulationSpec(
        kind=SystemKind.PAIR, dt=dt, T=T, stride=stride, model=model, saddle=sol,
        couplings=couplings, multiplicative=settings.get("simulation.multiplicative"),
    )


def pair_saddle(settings: Settings, model: SelfEnergyModel | None = None) -> SaddleSolution:
    """Synchronized saddle of the configured pair under the configured self-energy."""
    params = pair_params(settings)
    model = model or self_energy_model(settings)
    if isinstance(model, MarkovianPair):
        sol = solve_pair_markovian(params)
    else:
        sol = solve_pair_nonmarkovian(
            model, params.omega1, params.omega2, couplings_for(settings), n_starts=settings.get("self_energy.n_starts"),
        )
    if not isinstance(sol, SaddleSolution) or not sol.synchronized:
        reason = sol.reason if isinstance(sol, NoSync) else f"|Delta| = {abs(params.delta):.4g} > D"
        raise InvalidParameters(f"no synchronized saddle for the configured pair ({reason})", "simulate_pair_nonmarkovian")
    return sol


def system_spec(settings: Settings, kind: SystemKind) -> SimulationSpec:
    """Simulation spec of the configured system with the [simulation] step settings."""
    sim = settings.section("simulation")
    if kind == SystemKind.ADLER:
        params = pair_params(settings)
        sigma0_sq = settings.get("fokker_planck.sigma0_sq")
        if sigma0_sq is None:
            _, sigma0_sq = markovian_noise_levels(params, noise_convention(settings))
        return adler_spec(params, float(sigma0_sq), sim["dt"], sim["T"], sim["stride"], sim["theta_init"])
    if kind == SystemKind.SINGLE:
        return SimulationSpec(kind=kind, dt=sim["dt"], T=sim["T"], stride=sim["stride"], single=single_params(settings))
    model = self_energy_model(settings)
    return pair_spec(model, pair_saddle(settings, model), couplings_for(settings), settings,
                     sim["dt"], sim["T"], sim["stride"])


def _ensemble_kwargs(settings: Settings) -> dict[str, Any]:
    return {
        "threads": settings.threads,
        "block_size": settings.get("simulation.block_size"),
        "n_boot": settings.get("diffusion.n_boot"),
    }


def _fit_kwargs(settings: Settings) -> dict[str, Any]:
    return {
        "burn_in_fraction": settings.get("simulation.burn_in_fraction"),
        "window": settings.get("simulation.fit_window"),
    }


def detuning_scan(
    settings: Settings,
    n: float,
    D: float = MARKOVIAN_D,
    monte_carlo: bool = False,
    seed_index: int = 0,
) -> dict[str, np.ndarray]:
    """sigma_-^2 / sigma_0^2 of the Markovian pair over the configured Delta/D grid.

    ``ci_low``/``ci_high`` bracket the Monte Carlo ratio when ensembles are run,
    and are NaN otherwise.
    """
    grid = np.asarray(settings.get("diffusion.delta_over_D"), dtype=float)
    convention = noise_convention(settings)
    n_nodes = settings.get("diffusion.n_nodes")
    rows: dict[str, list[float]] = {k: [] for k in ("sigma_minus_sq", "sigma0_sq", "ratio", "ci_low", "ci_high")}
    rep = settings.section("reproduce")
    for i, x in enumerate(grid):
        params = markovian_pair(n, D, x)
        report = diffusion_report(params, convention, n_nodes=n_nodes)
        ci = (math.nan, math.nan)
        if monte_carlo:
            spec = adler_spec(params, report.sigma0_sq, rep["dt"], rep["T"], rep["stride"],
                              settings.get("simulation.theta_init"))
            stats = run_ensemble(spec, rep["n_traj"], trajectory_seed(settings.get("seed"), seed_index + i),
                                 **_ensemble_kwargs(settings))
            fit = fit_diffusion(stats, **_fit_kwargs(settings))
            ci = (fit.ci_low / report.sigma0_sq, fit.ci_high / report.sigma0_sq)
        rows["sigma_minus_sq"].append(report.sigma_minus_sq)
        rows["sigma0_sq"].append(report.sigma0_sq)
        rows["ratio"].append(report.ratio_minus_zero)
        rows["ci_low"].append(ci[0])
        rows["ci_high"].append(ci[1])
        logger.debug("n=%g Delta/D=%g: ratio %.4g", n, x, report.ratio_minus_zero)
    return {"Delta_over_D": grid, **{k: np.asarray(v) for k, v in rows.items()}}


def frequency_grid(settings: Settings) -> list[tuple[float, float]]:
    """(omega2, omega1) pairs: equally spaced omega1 around each configured omega2."""
    scan = settings.section("scan")
    omega_ex = settings.get("self_energy.omega_ex")
    offsets = np.linspace(-scan["omega1_span"], scan["omega1_span"], scan["omega1_points"])
    return [
        (ratio * omega_ex, ratio * omega_ex + off)
        for ratio in scan["omega2_over_omega_ex"]
        for off in offsets
    ]


def frequency_scan(
    settings: Settings, model: SelfEnergyModel, monte_carlo: bool = False, seed_index: int = 0,
) -> dict[str, np.ndarray]:
    """Synchronization frequency and sigma_-^2 / sigma_+^2 over the frequency grid.

    Unsynchronized points keep NaN entries so the gaps survive in the output.
    """
    couplings = couplings_for(settings)
    rep = settings.section("reproduce")
    keys = ("omega2", "omega1", "nu", "sigma_plus_sq", "sigma_minus_sq", "ratio", "ci_low", "ci_high",
            "ratio_projected", "r_squared_plus")
    rows: dict[str, list[float]] = {k: [] for k in keys}
    for i, (omega2, omega1) in enumerate(frequency_grid(settings)):
        row = dict.fromkeys(keys, math.nan)
        row.update(omega2=omega2, omega1=omega1)
        sol = solve_pair_nonmarkovian(model, omega1, omega2, couplings, n_starts=settings.get("self_energy.n_starts"))
        if isinstance(sol, SaddleSolution):
            plus, minus = projected_noise_variances(model, sol, couplings)
            row.update(nu=sol.nu, ratio_projected=minus / plus if plus > 0 else math.nan)
            if monte_carlo:
                spec = pair_spec(model, sol, couplings, settings, rep["nonmarkovian_dt"], rep["nonmarkovian_T"], rep["stride"])
                try:
                    stats = run_ensemble(spec, rep["n_traj"], trajectory_seed(settings.get("seed"), seed_index + i),
                                         **_ensemble_kwargs(settings))
                    fit_minus = fit_diffusion(stats, observable="theta_minus", **_fit_kwargs(settings))
                    fit_plus = fit_diffusion(stats, observable="theta_plus", **_fit_kwargs(settings))
                except SyncError as exc:
                    logger.warning("omega1=%.4g omega2=%.4g: ensemble skipped (%s)", omega1, omega2, exc)
                else:
                    row.update(
                        sigma_plus_sq=fit_plus.sigma_sq,
                        sigma_minus_sq=fit_minus.sigma_sq,
                        ratio=fit_minus.sigma_sq / fit_plus.sigma_sq,
                        ci_low=fit_minus.ci_low / fit_plus.sigma_sq,
                        ci_high=fit_minus.ci_high / fit_plus.sigma_sq,
                        r_squared_plus=fit_plus.r_squared,
                    )
        else:
            logger.debug("omega1=%.4g omega2=%.4g: %s", omega1, omega2, sol.reason)
        for k in keys:
            rows[k].append(row[k])
    return {k: np.asarray(v, dtype=float) for k, v in rows.items()}


def _lindblad_density(params: PairParams, cutoff: int, settings: Settings, n_bins: int) -> np.ndarray:
    """LME phase density, or NaN when the cutoff cannot hold the state."""
    try:
        lv = build_liouvillian(params, FockSpace(cutoff))
        rho = steady_state(lv, steady_state_method(settings), tol=settings.get("lindblad.tol"))
    except (CutoffTooSmall, CutoffDominated) as exc:
        logger.warning("Lindblad oracle skipped at n=%.3g, cutoff %d: %s", params.photon_number, cutoff, exc)
        return np.full(n_bins, math.nan)
    return phase_distribution_lme(rho, n_bins).density


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

def fig1(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """P(theta_-) at n=5: continued fraction, finite volumes, Monte Carlo and the LME."""
    rep = settings.section("reproduce")
    n_bins = settings.get("diffusion.n_bins")
    delta = settings.get("pair.omega1") - settings.get("pair.omega2")
    params = markovian_pair(FIG1_PHOTONS, MARKOVIAN_D, delta / MARKOVIAN_D)
    _, sigma0_sq = markovian_noise_levels(params, noise_convention(settings))
    with sink.timed("fokker_planck"):
        cf = stationary_adler_cf(params.delta, params.D, sigma0_sq, settings.get("fokker_planck.n_harmonics"), n_bins)
        n_grid = settings.get("fokker_planck.n_grid")
        grid = stationary_adler_grid(params.delta, params.D, sigma0_sq, n_grid)
        step = max(n_grid // n_bins, 1)
    columns: dict[str, np.ndarray] = {
        "theta": cf.grid,
        "continued_fraction": cf.density,
        "finite_volume": grid.density[::step][:n_bins],
    }
    mc = np.full(n_bins, math.nan)
    if rep["monte_carlo"]:
        with sink.timed("monte_carlo"):
            spec = adler_spec(params, sigma0_sq, rep["dt"], rep["T"], 1, settings.get("simulation.theta_init"))
            stats = run_ensemble(spec, rep["n_traj"], settings.get("seed"), keep_paths=True,
                                 **_ensemble_kwargs(settings))
            mc = wrapped_histogram(stats.paths["theta_minus"], n_bins, settings.get("simulation.burn_in_fraction")).density
    columns["monte_carlo"] = mc
    with sink.timed("lindblad"):
        columns["lindblad"] = _lindblad_density(params, rep["cutoff"], settings, n_bins)
    sink.write_table("fig1_phase_distribution.csv", columns)
    sink.write_text("plot_fig1.py", PLOT_SCRIPTS["fig1"])
    h = 2.0 * np.pi / n_bins
    summary: dict[str, Any] = {
        "sigma0_sq": sigma0_sq,
        "cf_vs_grid_linf": float(np.max(np.abs(columns["continued_fraction"] - columns["finite_volume"]))),
    }
    if rep["monte_carlo"]:
        summary["cf_vs_monte_carlo_l1"] = float(np.abs(cf.density - mc).sum() * h)
    if np.all(np.isfinite(columns["lindblad"])):
        summary["cf_vs_lindblad_l1"] = float(np.abs(cf.density - columns["lindblad"]).sum() * h)
    return summary


def fig2(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """Adler trajectories at n=10, Delta=0.13 D and the ensemble variance with its fit."""
    rep = settings.section("reproduce")
    params = markovian_pair(FIG2_PHOTONS, MARKOVIAN_D, FIG2_DELTA_OVER_D)
    _, sigma0_sq = markovian_noise_levels(params, noise_convention(settings))
    spec = adler_spec(params, sigma0_sq, rep["dt"], rep["T"], rep["stride"], settings.get("simulation.theta_init"))
    with sink.timed("ensemble"):
        stats = run_ensemble(spec, max(rep["n_traj"], rep["n_paths"]), settings.get("seed"),
                             keep_paths=True, **_ensemble_kwargs(settings))
    paths = stats.paths["theta_minus"][: rep["n_paths"]]
    traj_cols: dict[str, np.ndarray] = {"t": stats.times}
    for k, path in enumerate(paths):
        traj_cols[f"theta_minus_{k}"] = path
    sink.write_table("fig2_trajectories.csv", traj_cols)
    sink.write_table("fig2_variance.csv", {
        "t": stats.times,
        "theta_minus_mean": stats.mean["theta_minus"],
        "theta_minus_var": stats.var["theta_minus"],
    })
    fit = fit_diffusion(stats, **_fit_kwargs(settings))
    quad = reimann_sigma_minus(params.delta, params.D, sigma0_sq, settings.get("diffusion.n_nodes"))
    sink.write_text("plot_fig2.py", PLOT_SCRIPTS["fig2"])
    return {
        "sigma0_sq": sigma0_sq,
        "sigma_minus_sq_fit": fit.sigma_sq,
        "ci": [fit.ci_low, fit.ci_high],
        "sigma_minus_sq_quadrature": quad.value,
        "r_squared": fit.r_squared,
    }


def fig3(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """sigma_-^2 / sigma_0^2 against Delta/D per photon number, and the D inset at Delta=0."""
    rep = settings.section("reproduce")
    summary: dict[str, Any] = {}
    photon_numbers = [float(n) for n in settings.get("diffusion.photon_numbers")]
    for j, n in enumerate(photon_numbers):
        with sink.timed(f"scan_n{n:g}"):
            table = detuning_scan(settings, n, monte_carlo=rep["monte_carlo"], seed_index=1000 * j)
        sink.write_table(f"fig3_n{n:g}.csv", table)
        summary[f"n={n:g}"] = {"ratio_at_zero": float(table["ratio"][np.argmin(np.abs(table["Delta_over_D"]))])}
    d_values = np.linspace(0.1, rep["inset_D"], INSET_D_POINTS)
    inset: dict[str, np.ndarray] = {"D": d_values}
    convention = noise_convention(settings)
    with sink.timed("inset"):
        for n in photon_numbers:
            inset[f"sigma_minus_sq_n{n:g}"] = np.array([
                diffusion_report(markovian_pair(n, D, 0.0), convention, settings.get("diffusion.n_nodes")).sigma_minus_sq
                for D in d_values
            ])
    sink.write_table("fig3_inset.csv", inset)
    sink.write_text("plot_fig3.py", PLOT_SCRIPTS["fig3"])
    return summary


def fig4(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """Self-energy curves and the synchronization frequency over the scan grid."""
    model = self_energy_model(settings)
    omega_ex = settings.get("self_energy.omega_ex")
    omega = np.linspace(omega_ex - SELF_ENERGY_HALF_SPAN, omega_ex + SELF_ENERGY_HALF_SPAN, SELF_ENERGY_POINTS)
    if isinstance(model, Tabulated):
        omega = omega[(omega >= model.omega[0]) & (omega <= model.omega[-1])]
    pir = np.empty((omega.size, 2), dtype=complex)
    pik = np.empty((omega.size, 2), dtype=complex)
    for i, w in enumerate(omega):
        r, k = eval_self_energy(model, float(w))
        pir[i] = r[0, 0], r[0, 1]
        pik[i] = k[0, 0], k[0, 1]
    sink.write_table("fig4_self_energy.csv", {
        "omega": omega,
        "re_pir11": pir[:, 0].real, "im_pir11": pir[:, 0].imag,
        "re_pir12": pir[:, 1].real, "im_pir12": pir[:, 1].imag,
        "re_pik11": pik[:, 0].real, "im_pik11": pik[:, 0].imag,
    })
    couplings = couplings_for(settings)
    rows: dict[str, list[float]] = {"omega2": [], "omega1": [], "nu": [], "synchronized": []}
    with sink.timed("saddle_scan"):
        for omega2, omega1 in frequency_grid(settings):
            sol = solve_pair_nonmarkovian(model, omega1, omega2, couplings,
                                          n_starts=settings.get("self_energy.n_starts"))
            synced = isinstance(sol, SaddleSolution)
            rows["omega2"].append(omega2)
            rows["omega1"].append(omega1)
            rows["nu"].append(sol.nu if synced else math.nan)
            rows["synchronized"].append(1.0 if synced else 0.0)
    sink.write_table("fig4_nu.csv", {k: np.asarray(v) for k, v in rows.items()})
    sink.write_text("plot_fig4.py", PLOT_SCRIPTS["fig4"])
    return {"points": len(rows["nu"]), "synchronized": int(sum(rows["synchronized"]))}


def fig5(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """sigma_-^2 / sigma_+^2 against omega1 for each omega2 of the scan."""
    model = self_energy_model(settings)
    with sink.timed("frequency_scan"):
        table = frequency_scan(settings, model, monte_carlo=settings.get("reproduce.monte_carlo"))
    sink.write_table("fig5_ratio.csv", table)
    sink.write_text("plot_fig5.py", PLOT_SCRIPTS["fig5"])
    synced = np.isfinite(table["nu"])
    return {"points": int(table["nu"].size), "synchronized": int(synced.sum())}


def s1(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """Field trajectory and autocorrelation of the frequency-dependent pair at omega_ex.

    Lags run to ``correlation_span / gamma2`` and the record is long enough
    for those lags to stay within a quarter of its stationary part.
    """
    rep = settings.section("reproduce")
    model = self_energy_model(settings)
    couplings = couplings_for(settings)
    omega_ex = settings.get("self_energy.omega_ex")
    sol = solve_pair_nonmarkovian(model, omega_ex, omega_ex, couplings, n_starts=settings.get("self_energy.n_starts"))
    if not isinstance(sol, SaddleSolution):
        raise InvalidParameters(f"no synchronized limit cycle at omega_ex ({sol.reason})", "reproduce s1")
    burn_in = settings.get("simulation.burn_in_fraction")
    target = rep["correlation_span"] / couplings.gamma2
    dt = rep["correlation_dt"]
    sample_dt = dt * rep["stride"]
    T = 4.0 * target / (1.0 - burn_in) + 2.0 * sample_dt
    spec = pair_spec(model, sol, couplings, settings, dt, T, rep["stride"])
    with sink.timed("ensemble"):
        stats = run_ensemble(spec, rep["n_traj"], settings.get("seed"), keep_paths=True,
                             **_ensemble_kwargs(settings))
    phi = stats.phi
    sink.write_table("s1_trajectory.csv", {
        "t": stats.times,
        "re_phi1": phi[0, 0].real, "im_phi1": phi[0, 0].imag,
        "re_phi2": phi[0, 1].real, "im_phi2": phi[0, 1].imag,
    })
    sample_dt = float(stats.times[1] - stats.times[0])
    start = int(np.floor(burn_in * stats.times.size))
    tau_max = min(target, (stats.times.size - start - 1) * sample_dt / 4.0)
    if tau_max < target:
        logger.warning("s1: lags cut to %.4g of the requested %.4g", tau_max, target)
    table = autocorrelation(phi, tau_max, sample_dt=sample_dt, burn_in_fraction=burn_in)
    c11, c12 = table.component(0, 0), table.component(0, 1)
    sink.write_table("s1_correlation.csv", {
        "tau": table.taus,
        "re_c11": c11.real, "im_c11": c11.imag, "abs_c11": np.abs(c11),
        "re_c12": c12.real, "im_c12": c12.imag,
    })
    tau_c, err = fit_correlation_time(table)
    sink.write_text("plot_s1.py", PLOT_SCRIPTS["s1"])
    return {
        "tau_c": tau_c,
        "tau_c_stderr": err,
        "tau_c_linear": phase_correlation_time(model, sol, couplings),
        "inverse_gamma2": 1.0 / couplings.gamma2,
    }


def s2(settings: Settings, sink: OutputSink) -> dict[str, Any]:
    """Complex Langevin pair against the noisy Adler reduction at Delta=0 for each photon number."""
    rep = settings.section("reproduce")
    n_bins = settings.get("diffusion.n_bins")
    convention = noise_convention(settings)
    photon_numbers = [float(n) for n in settings.get("diffusion.photon_numbers")]
    diff_rows: dict[str, list[float]] = {
        k: [] for k in ("n", "sigma_minus_sq_langevin", "ci_low", "ci_high", "sigma_minus_sq_adler", "sigma0_sq")
    }
    for j, n in enumerate(photon_numbers):
        params = markovian_pair(n, MARKOVIAN_D, 0.0)
        model = MarkovianPair(gamma1=params.gamma1, D=params.D)
        sol = solve_pair_markovian(params)
        report = diffusion_report(params, convention, settings.get("diffusion.n_nodes"))
        with sink.timed(f"langevin_n{n:g}"):
            couplings = QuarticCouplings.stuart_landau(params.gamma2)
            spec = pair_spec(model, sol, couplings, settings, rep["dt"], rep["T"], rep["stride"])
            stats = run_ensemble(spec, rep["n_traj"], trajectory_seed(settings.get("seed"), j),
                                 keep_paths=True, **_ensemble_kwargs(settings))
        fit = fit_diffusion(stats, **_fit_kwargs(settings))
        diff_rows["n"].append(n)
        diff_rows["sigma_minus_sq_langevin"].append(fit.sigma_sq)
        diff_rows["ci_low"].append(fit.ci_low)
        diff_rows["ci_high"].append(fit.ci_high)
        diff_rows["sigma_minus_sq_adler"].append(report.sigma_minus_sq)
        diff_rows["sigma0_sq"].append(report.sigma0_sq)

        cf = stationary_adler_cf(0.0, params.D, report.sigma0_sq, settings.get("fokker_planck.n_harmonics"), n_bins)
        hist = wrapped_histogram(stats.paths["theta_minus"], n_bins, settings.get("simulation.burn_in_fraction"))
        with sink.timed(f"lindblad_n{n:g}"):
            lme = _lindblad_density(params, rep["s2_cutoff"], settings, n_bins)
        sink.write_table(f"s2_phase_n{n:g}.csv", {
            "theta": cf.grid, "langevin": hist.density, "continued_fraction": cf.density, "lindblad": lme,
        })
    sink.write_table("s2_diffusion.csv", {k: np.asarray(v) for k, v in diff_rows.items()})
    sink.write_text("plot_s2.py", PLOT_SCRIPTS["s2"])
    return {
        f"n={n:g}": {"langevin": lv, "adler": ad}
        for n, lv, ad in zip(diff_rows["n"], diff_rows["sigma_minus_sq_langevin"], diff_rows["sigma_minus_sq_adler"])
    }


TARGET_FUNCTIONS: dict[str, Callable[[Settings, OutputSink], dict[str, Any]]] = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "s1": s1,
    "s2": s2,
}


def run_target(name: str, settings: Settings, sink: OutputSink) -> dict[str, Any]:
    if name not in TARGET_FUNCTIONS:
        raise InvalidParameters(f"unknown target {name!r}; choose from {', '.join(TARGETS)}", "reproduce")
    logger.debug("reproducing %s", name)
    return TARGET_FUNCTIONS[name](settings, sink)


_PLOT_HEADER = """\
import glob

import matplotlib.pyplot as plt
import numpy as np


def load(name):
    return np.genfromtxt(name, delimiter=",", names=True)

"""

PLOT_SCRIPTS: dict[str, str] = {
    "fig1": _PLOT_HEADER + """\
d = load("fig1_phase_distribution.csv")
for col in ("continued_fraction", "finite_volume", "monte_carlo", "lindblad"):
    plt.plot(d["theta"], d[col], label=col)
plt.xlabel("theta_-")
plt.ylabel("P(theta_-)")
plt.legend()
plt.savefig("fig1.png", dpi=150)
""",
    "fig2": _PLOT_HEADER + """\
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
t = load("fig2_trajectories.csv")
for name in t.dtype.names[1:]:
    ax1.plot(t["t"], t[name] / np.pi, lw=0.8)
ax1.set_ylabel("theta_- / pi")
v = load("fig2_variance.csv")
ax2.plot(v["t"], v["theta_minus_var"])
ax2.set_xlabel("t")
ax2.set_ylabel("Var theta_-")
fig.savefig("fig2.png", dpi=150)
""",
    "fig3": _PLOT_HEADER + """\
fig, ax = plt.subplots()
for name in sorted(glob.glob("fig3_n*.csv")):
    d = load(name)
    ax.plot(d["Delta_over_D"], d["ratio"], label=name[5:-4])
    ax.fill_between(d["Delta_over_D"], d["ci_low"], d["ci_high"], alpha=0.2)
ax.axvline(1.0, color="k", lw=0.5)
ax.set_xscale("log")
ax.set_xlabel("Delta / D")
ax.set_ylabel("sigma_-^2 / sigma_0^2")
ax.legend()
inset = fig.add_axes([0.55, 0.2, 0.3, 0.3])
d = load("fig3_inset.csv")
for name in d.dtype.names[1:]:
    inset.plot(d["D"], d[name])
fig.savefig("fig3.png", dpi=150)
""",
    "fig4": _PLOT_HEADER + """\
d = load("fig4_self_energy.csv")
plt.plot(d["omega"], d["re_pir11"], label="Re Pi^R_11")
plt.plot(d["omega"], d["im_pir11"], label="Im Pi^R_11")
plt.plot(d["omega"], d["im_pik11"], label="Im Pi^K_11")
nu = load("fig4_nu.csv")
for w in np.unique(nu["omega2"]):
    sel = (nu["omega2"] == w) & (nu["omega1"] == w)
    if np.any(sel) and np.isfinite(nu["nu"][sel][0]):
        plt.axvline(nu["nu"][sel][0], lw=0.5)
plt.xlabel("omega")
plt.legend()
plt.savefig("fig4.png", dpi=150)
""",
    "fig5": _PLOT_HEADER + """\
d = load("fig5_ratio.csv")
for w in np.unique(d["omega2"]):
    sel = d["omega2"] == w
    col = d["ratio"] if np.any(np.isfinite(d["ratio"][sel])) else d["ratio_projected"]
    plt.plot(d["omega1"][sel], col[sel], "o-", label=f"omega2={w:.2f}")
plt.xlabel("omega1")
plt.ylabel("sigma_-^2 / sigma_+^2")
plt.legend()
plt.savefig("fig5.png", dpi=150)
""",
    "s1": _PLOT_HEADER + """\
fig, (ax1, ax2) = plt.subplots(2, 1)
t = load("s1_trajectory.csv")
ax1.plot(t["t"], t["re_phi1"], label="Re phi_1")
ax1.plot(t["t"], t["re_phi2"], label="Re phi_2")
ax1.legend()
c = load("s1_correlation.csv")
ax2.plot(c["tau"], c["abs_c11"], label="|C_11|")
ax2.plot(c["tau"], np.hypot(c["re_c12"], c["im_c12"]), label="|C_12|")
ax2.set_xlabel("tau")
ax2.legend()
fig.savefig("s1.png", dpi=150)
""",
    "s2": _PLOT_HEADER + """\
fig, (ax1, ax2) = plt.subplots(1, 2)
d = load("s2_diffusion.csv")
ax1.errorbar(d["n"], d["sigma_minus_sq_langevin"],
             yerr=[d["sigma_minus_sq_langevin"] - d["ci_low"], d["ci_high"] - d["sigma_minus_sq_langevin"]],
             fmt="o", label="Langevin")
ax1.plot(d["n"], d["sigma_minus_sq_adler"], "s", label="Adler")
ax1.set_xscale("log")
ax1.legend()
for name in sorted(glob.glob("s2_phase_n*.csv")):
    p = load(name)
    ax2.plot(p["theta"], p["langevin"], label=name[9:-4])
    ax2.plot(p["theta"], p["lindblad"], "--")
ax2.legend()
fig.savefig("s2.png", dpi=150)
""",
}
