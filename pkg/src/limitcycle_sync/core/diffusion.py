"""Noise levels, effective phase-difference diffusion and estimators from ensembles."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.special import logsumexp
from scipy.stats import linregress

from limitcycle_sync.core.errors import InsufficientData, InvalidParameters
from limitcycle_sync.core.saddle import drift_matrices, linearized_drift, saddle_point_field, solve_pair_markovian
from limitcycle_sync.core.self_energy import noise_matrix
from limitcycle_sync.models import NoiseConvention
from limitcycle_sync.models.diffusion import DiffusionFit, DiffusionReport, QuadratureResult
from limitcycle_sync.models.distribution import PhaseDistribution, phase_grid
from limitcycle_sync.models.params import PairParams, QuarticCouplings
from limitcycle_sync.models.saddle import SaddleSolution
from limitcycle_sync.models.self_energy import MarkovianPair, SelfEnergyModel
from limitcycle_sync.models.trajectory import EnsembleStats, Trajectory
from limitcycle_sync.utils.angles import grid_index

logger = logging.getLogger(__name__)

PERIOD = 2.0 * np.pi
QUADRATURE_TOLERANCE = 1e-6
MAX_NODES = 2048
LOG_UNDERFLOW = -700.0


def noise_variances(params: PairParams) -> tuple[float, float]:
    """Closed-form (<xi_+^2>, <xi_-^2>) of the phase-sum and phase-difference noise.

    3 gamma2/2 - D gamma2/(2 gamma1) (1 + (2 -/+ 1) Re sqrt(1 - Delta^2/D^2)).
    """
    g1, g2, D = params.gamma1, params.gamma2, params.D
    if D > 0:
        root = np.sqrt(complex(1.0 - (params.delta / D) ** 2)).real
    else:
        root = 0.0
    base = 1.5 * g2
    scale = D * g2 / (2.0 * g1)
    xi_plus = base - scale * (1.0 + 1.0 * root)
    xi_minus = base - scale * (1.0 + 3.0 * root)
    return float(xi_plus), float(xi_minus)


def projected_noise_variances(
    model: SelfEnergyModel, sol: SaddleSolution, couplings: QuarticCouplings,
) -> tuple[float, float]:
    """(sigma_+^2, sigma_-^2) from the noise matrix in the saddle's co-rotating frame.

    sigma_pm^2 = (C11 + C22 +/- 2 Re C12) / 4; without locking the cross term
    averages out.
    """
    if sol.theta0 is None:
        c, _ = noise_matrix(model, sol.nu, sol.radii, couplings)
        diag = float(c[0, 0].real + c[1, 1].real) / 4.0
        return diag, diag
    c, _ = noise_matrix(model, sol.nu, sol.radii, couplings, phases=(0.5 * sol.theta0, -0.5 * sol.theta0))
    diag = float(c[0, 0].real + c[1, 1].real)
    cross = float(2.0 * c[0, 1].real)
    return (diag + cross) / 4.0, (diag - cross) / 4.0


def common_phase_diffusion(
    model: SelfEnergyModel, sol: SaddleSolution, couplings: QuarticCouplings,
) -> float:
    """Growth rate of Var(theta_n) for a locked pair in the linear-noise limit.

    The frozen noise A^-1 B is projected on the left null vector of the
    linearized drift, normalized against the common rotation of both fields.
    """
    if sol.theta0 is None:
        raise InvalidParameters("common-phase diffusion needs a synchronized saddle", "common_phase_diffusion")
    jac = linearized_drift(sol, model, couplings)
    _, a = drift_matrices(model, sol)
    _, b = noise_matrix(model, sol.nu, sol.radii, couplings)
    g = np.linalg.solve(a, b)
    real_g = np.block([[g.real, -g.imag], [g.imag, g.real]])
    # each of Re w, Im w carries half of E|w|^2 = dt
    cov = 0.5 * real_g @ real_g.T

    phi0 = saddle_point_field(sol.theta0)
    rotation = np.concatenate([phi0.imag, -phi0.real])
    vals, left = scipy.linalg.eig(jac, left=True, right=False)
    k = int(np.argmin(np.abs(vals)))
    u = left[:, k]
    u = (u / u[np.argmax(np.abs(u))]).real
    overlap = float(u @ rotation)
    if abs(overlap) < 1e-12:
        raise InvalidParameters("drift has no neutral common-phase mode", "common_phase_diffusion")
    u = u / overlap
    return float(u @ cov @ u)


def phase_correlation_time(
    model: SelfEnergyModel, sol: SaddleSolution, couplings: QuarticCouplings,
) -> float:
    """Time constant of |C_11(tau)| ~ exp(-rate * tau / 2) with the common-phase diffusion rate."""
    return 2.0 / common_phase_diffusion(model, sol, couplings)


def markovian_noise_levels(
    params: PairParams, convention: NoiseConvention = NoiseConvention.NOISE_MATRIX,
) -> tuple[float, float]:
    """(sigma_+^2, sigma0^2) of the Markovian pair under the chosen convention."""
    if convention == NoiseConvention.TEXT:
        xi_plus, xi_minus = noise_variances(params)
        return 0.5 * xi_plus, 0.5 * xi_minus
    sol = solve_pair_markovian(params)
    model = MarkovianPair(gamma1=params.gamma1, D=params.D)
    return projected_noise_variances(model, sol, QuarticCouplings.stuart_landau(params.gamma2))


def _washboard(x: np.ndarray, Delta: float, D: float) -> np.ndarray:
    return -Delta * x + D * np.cos(x)


def _log_integrals(Delta: float, D: float, s: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """log I_+(x_i), log I_-(x_i) on a uniform periodic x grid with Gauss-Legendre in y."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    y = 0.5 * PERIOD * (nodes + 1.0)
    log_w = np.log(0.5 * PERIOD * weights)
    x = PERIOD * np.arange(n) / n
    ux = _washboard(x, Delta, D)[:, None]
    plus = (ux - _washboard(x[:, None] - y[None, :], Delta, D)) / s + log_w
    minus = (_washboard(x[:, None] + y[None, :], Delta, D) - ux) / s + log_w
    return logsumexp(plus, axis=1), logsumexp(minus, axis=1)


def _log_sigma_minus(Delta: float, D: float, s: float, n: int) -> float:
    log_plus, log_minus = _log_integrals(Delta, D, s, n)
    log_num = logsumexp(2.0 * log_plus + log_minus) - np.log(n)
    log_den = logsumexp(log_plus) - np.log(n)
    return float(np.log(s) + log_num - 3.0 * log_den)


def _refine(evaluate, n_nodes: int, label: str) -> tuple[float, float, int]:
    """Double the node count until two successive log-values agree to the tolerance."""
    n = n_nodes
    previous = evaluate(n)
    while True:
        current = evaluate(2 * n)
        rel = float(abs(np.expm1(current - previous)))
        if rel < QUADRATURE_TOLERANCE or 2 * n >= MAX_NODES:
            if rel >= QUADRATURE_TOLERANCE:
                logger.warning("%s: quadrature relative error %.2e at %d nodes", label, rel, 2 * n)
            return current, rel, 2 * n
        previous, n = current, 2 * n


def reimann_sigma_minus(Delta: float, D: float, sigma0_sq: float, n_nodes: int = 512) -> QuadratureResult:
    """Effective diffusion of x' = Delta + D sin x + noise(sigma0_sq) over one period.

    D_eff = s <I_+^2 I_-> / <I_+>^3 with
    I_+(x) = int_0^L exp((U(x) - U(x - y)) / s) dy,
    I_-(x) = int_0^L exp((U(x + y) - U(x)) / s) dy, U(x) = -Delta x + D cos x,
    evaluated in the log domain.
    """
    if not sigma0_sq > 0:
        raise InvalidParameters(f"sigma0_sq must be > 0, got {sigma0_sq}", "reimann_sigma_minus")
    if D == 0:
        return QuadratureResult(value=float(sigma0_sq), rel_error=0.0, n_nodes=0)
    log_value, rel, nodes = _refine(
        lambda n: _log_sigma_minus(Delta, D, sigma0_sq, n), n_nodes, "reimann_sigma_minus",
    )
    if log_value < LOG_UNDERFLOW:
        logger.warning("effective diffusion underflows (log value %.1f); reporting 0", log_value)
        return QuadratureResult(value=0.0, rel_error=rel, n_nodes=nodes, underflow=True)
    return QuadratureResult(value=float(np.exp(log_value)), rel_error=rel, n_nodes=nodes)


def reimann_drift(Delta: float, D: float, sigma0_sq: float, n_nodes: int = 512) -> QuadratureResult:
    """Mean phase velocity L s (1 - exp(-L Delta / s)) / int_0^L I_+(x) dx."""
    if not sigma0_sq > 0:
        raise InvalidParameters(f"sigma0_sq must be > 0, got {sigma0_sq}", "reimann_drift")
    if Delta == 0:
        return QuadratureResult(value=0.0, rel_error=0.0, n_nodes=0)
    if Delta < 0:
        # v(-Delta) = -v(Delta)
        mirrored = reimann_drift(-Delta, D, sigma0_sq, n_nodes)
        return QuadratureResult(-mirrored.value, mirrored.rel_error, mirrored.n_nodes, mirrored.underflow)

    def evaluate(n: int) -> float:
        log_plus, _ = _log_integrals(Delta, D, sigma0_sq, n)
        log_int = logsumexp(log_plus) + np.log(PERIOD / n)
        return float(np.log(PERIOD * sigma0_sq) + np.log(-np.expm1(-PERIOD * Delta / sigma0_sq)) - log_int)

    log_value, rel, nodes = _refine(evaluate, n_nodes, "reimann_drift")
    if log_value < LOG_UNDERFLOW:
        return QuadratureResult(value=0.0, rel_error=rel, n_nodes=nodes, underflow=True)
    return QuadratureResult(value=float(np.exp(log_value)), rel_error=rel, n_nodes=nodes)


def _window(times: np.ndarray, burn_in_fraction: float, window: float) -> np.ndarray:
    """Sample indices from the end of the burn-in over ``window`` of the record."""
    if not 0.0 <= burn_in_fraction < 1.0:
        raise InvalidParameters(f"burn_in_fraction must be in [0, 1), got {burn_in_fraction}", "fit_diffusion")
    if not 0.0 < window <= 1.0 - burn_in_fraction + 1e-12:
        raise InvalidParameters(
            f"window {window} does not fit after a burn-in of {burn_in_fraction}", "fit_diffusion",
        )
    last = times.size - 1
    start = int(np.ceil(burn_in_fraction * last - 1e-9))
    stop = min(int(np.floor((burn_in_fraction + window) * last + 1e-9)), last)
    return np.arange(start, stop + 1)


def replicate_variances(stats: EnsembleStats, observable: str, idx: np.ndarray) -> np.ndarray:
    """Unbiased variance of each bootstrap replicate at the samples ``idx``, shape (n_kept, idx.size).

    Replicates that drew fewer than two trajectories are dropped.
    """
    weight = stats.replicate_weight
    keep = weight > 1.0
    w = weight[keep][:, None]
    s1 = stats.replicate_sum[observable][keep][:, idx]
    s2 = stats.replicate_sq[observable][keep][:, idx]
    return np.maximum(s2 - s1 * s1 / w, 0.0) / (w - 1.0)


def fit_diffusion(
    stats: EnsembleStats,
    burn_in_fraction: float = 0.2,
    window: float = 0.6,
    observable: str = "theta_minus",
    confidence: float = 0.95,
) -> DiffusionFit:
    """Least-squares slope of Var(t) over the window after the burn-in, halved.

    The confidence interval is a percentile interval over the ensemble's
    trajectory bootstrap replicates; without replicates it falls back to
    the regression standard error.
    """
    if observable not in stats.var:
        raise InvalidParameters(f"ensemble has no observable {observable!r}", "fit_diffusion")
    idx = _window(stats.times, burn_in_fraction, window)
    if idx.size < 10:
        raise InsufficientData(f"only {idx.size} time points in the fit window", "fit_diffusion")
    t = stats.times[idx]
    v = stats.var[observable][idx]
    if np.ptp(v) == 0.0:
        fit_slope, stderr, r_sq = 0.0, 0.0, 1.0
    else:
        reg = linregress(t, v)
        fit_slope, stderr, r_sq = float(reg.slope), float(reg.stderr), float(reg.rvalue ** 2)
    sigma_sq = 0.5 * fit_slope

    alpha = 0.5 * (1.0 - confidence)
    boot = None
    if stats.n_traj >= 2 and observable in stats.replicate_sum:
        boot = replicate_variances(stats, observable, idx)
    if boot is not None and boot.shape[0] >= 2:
        slopes = np.polyfit(t, boot.T, 1)[0]
        low, high = np.quantile(0.5 * slopes, [alpha, 1.0 - alpha])
    else:
        logger.debug("%s: no bootstrap replicates, using the regression error", observable)
        low, high = sigma_sq - 1.96 * 0.5 * stderr, sigma_sq + 1.96 * 0.5 * stderr
    return DiffusionFit(
        sigma_sq=sigma_sq,
        ci_low=float(low),
        ci_high=float(high),
        stderr=0.5 * stderr,
        r_squared=r_sq,
        n_points=int(idx.size),
        observable=observable,
    )


def _theta_minus_samples(trajectories: np.ndarray | Sequence[Trajectory]) -> np.ndarray:
    if isinstance(trajectories, np.ndarray):
        arr = np.asarray(trajectories, dtype=float)
        return arr[None, :] if arr.ndim == 1 else arr
    return np.stack([t.theta_minus for t in trajectories])


def wrapped_histogram(
    trajectories: np.ndarray | Sequence[Trajectory],
    n_bins: int = 64,
    burn_in_fraction: float = 0.2,
) -> PhaseDistribution:
    """Histogram of theta_- wrapped into [-pi, pi), bins centred on the phase grid."""
    paths = _theta_minus_samples(trajectories)
    start = int(np.floor(burn_in_fraction * paths.shape[1]))
    samples = paths[:, start:].ravel()
    if samples.size < 100:
        raise InsufficientData(f"only {samples.size} samples after burn-in", "wrapped_histogram")
    counts = np.bincount(grid_index(samples, n_bins), minlength=n_bins).astype(float)
    h = 2.0 * np.pi / n_bins
    return PhaseDistribution(
        grid=phase_grid(n_bins),
        density=counts / (samples.size * h),
        method="monte-carlo",
        meta={"samples": int(samples.size), "n_traj": int(paths.shape[0])},
    )


def diffusion_report(
    params: PairParams,
    convention: NoiseConvention = NoiseConvention.NOISE_MATRIX,
    n_nodes: int = 512,
    fits: dict[str, DiffusionFit] | None = None,
) -> DiffusionReport:
    """Quadrature sigma_-^2 of the Markovian pair against its noise normalization."""
    sigma_plus_sq, sigma0_sq = markovian_noise_levels(params, convention)
    if sigma0_sq <= 0:
        raise InvalidParameters(
            f"noise level sigma0^2 = {sigma0_sq:.4g} is not positive under the {convention.value} convention",
            "diffusion_report",
        )
    quad = reimann_sigma_minus(params.delta, params.D, sigma0_sq, n_nodes=n_nodes)
    return DiffusionReport(
        sigma_minus_sq=quad.value,
        sigma_plus_sq=sigma_plus_sq,
        sigma0_sq=sigma0_sq,
        convention=convention,
        underflow=quad.underflow,
        quadrature_error=quad.rel_error,
        fits=dict(fits or {}),
    )
