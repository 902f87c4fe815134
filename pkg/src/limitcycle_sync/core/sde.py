"""Euler-Maruyama integrators for the Adler, Stuart-Landau and pair Langevin systems."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import lfilter

from limitcycle_sync.core.errors import (
    InsufficientLength,
    InvalidParameters,
    SingularFriction,
    StepTooLarge,
)
from limitcycle_sync.core.saddle import drift_matrices, saddle_point_field
from limitcycle_sync.core.self_energy import noise_matrix
from limitcycle_sync.models.params import QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.saddle import SaddleSolution
from limitcycle_sync.models.self_energy import SelfEnergyModel
from limitcycle_sync.models.trajectory import (
    CorrelationTable,
    EnsembleStats,
    SimulationSpec,
    SystemKind,
    Trajectory,
)
from limitcycle_sync.utils.hashing import replicate_weights, trajectory_seed

logger = logging.getLogger(__name__)

CHUNK_STEPS = 4096
DEFAULT_BLOCK_SIZE = 64
DEFAULT_REPLICATES = 200
STEP_GUARD = 0.1
MAX_FRICTION_CONDITION = 1e8


# ---------------------------------------------------------------------------
# public single-trajectory entry points
# ---------------------------------------------------------------------------

def simulate_adler(
    Delta: float,
    D: float,
    sigma0_sq: float,
    theta_init: float,
    dt: float,
    T: float,
    seed: int,
    stride: int = 1,
) -> Trajectory:
    """Noisy Adler equation d theta = (Delta + D sin theta) dt + sqrt(2 sigma0_sq dt) g."""
    spec = SimulationSpec(
        kind=SystemKind.ADLER, dt=dt, T=T, stride=stride,
        delta=Delta, D=D, sigma0_sq=sigma0_sq, theta_init=theta_init,
    )
    return simulate(spec, seed)


def simulate_single_sl(
    params: SingleOscillatorParams,
    dt: float,
    T: float,
    seed: int,
    stride: int = 1,
    eta_init: float = 0.0,
    theta_init: float = 0.0,
    noise_scale: float = 1.0,
) -> Trajectory:
    """Radial/angular Langevin pair of one Stuart-Landau oscillator.

    (d/dt + gamma1) eta = Im xi and d theta/dt = Re xi, each quadrature with
    intensity 3 gamma2 / 2.
    """
    spec = SimulationSpec(
        kind=SystemKind.SINGLE, dt=dt, T=T, stride=stride, single=params,
        eta_init=eta_init, theta_init=theta_init, noise_scale=noise_scale,
    )
    return simulate(spec, seed)


def simulate_pair_nonmarkovian(
    model: SelfEnergyModel,
    sol: SaddleSolution,
    couplings: QuarticCouplings,
    dt: float,
    T: float,
    seed: int,
    stride: int = 1,
    multiplicative: bool = False,
    perturbation: tuple[complex, complex] = (0j, 0j),
    noise_scale: float = 1.0,
    keep_field: bool = False,
) -> Trajectory:
    """Itô matrix Langevin equation of the pair around a synchronized saddle point.

    A dphi/dt = -[P^R(nu) phi - lambda1 r_m^2 |phi_m|^2 phi_m] + B xi, with
    P^R_mn = (nu - omega_n) delta_mn - Pi^R_mn(nu) r_n / r_m and
    A = i (1 - dPi^R/domega r_n / r_m).
    """
    spec = SimulationSpec(
        kind=SystemKind.PAIR, dt=dt, T=T, stride=stride, model=model, saddle=sol,
        couplings=couplings, multiplicative=multiplicative, perturbation=perturbation,
        noise_scale=noise_scale, keep_field=keep_field,
    )
    return simulate(spec, seed)


def simulate(spec: SimulationSpec, seed: int) -> Trajectory:
    """One seeded trajectory of any configured system."""
    out = integrate_block(spec, [seed])
    return Trajectory(
        kind=spec.kind,
        dt=spec.dt,
        times=spec.times,
        thetas=out.thetas[0],
        etas=None if out.etas is None else out.etas[0],
        seed=int(seed),
        phi=None if out.phi is None else out.phi[0],
    )


# ---------------------------------------------------------------------------
# vectorized block integration
# ---------------------------------------------------------------------------

@dataclass
class BlockPaths:
    """Paths of a block of trajectories; arrays are (n_traj, n_osc, n_samples)."""

    thetas: np.ndarray
    etas: np.ndarray | None = None
    phi: np.ndarray | None = None


def integrate_block(spec: SimulationSpec, seeds: Sequence[int]) -> BlockPaths:
    """Integrate one trajectory per seed.

    Every generator draws its increments in fixed time chunks, so a path
    depends only on its own seed and never on the block it runs in.
    """
    rngs = [np.random.default_rng(int(s)) for s in seeds]
    if spec.kind == SystemKind.ADLER:
        return _adler_block(spec, rngs)
    if spec.kind == SystemKind.SINGLE:
        return _single_block(spec, rngs)
    return _pair_block(spec, rngs)


def _draw(rngs: list[np.random.Generator], length: int, width: int) -> np.ndarray:
    """Standard normals of shape (length, n_traj, width)."""
    return np.stack([rng.standard_normal((length, width)) for rng in rngs], axis=1)


def _chunks(n_steps: int) -> Iterable[tuple[int, int]]:
    for start in range(0, n_steps, CHUNK_STEPS):
        yield start, min(CHUNK_STEPS, n_steps - start)


def _adler_block(spec: SimulationSpec, rngs: list[np.random.Generator]) -> BlockPaths:
    dt = spec.dt
    if dt * max(abs(spec.delta) + spec.D, 1.0) >= STEP_GUARD:
        raise StepTooLarge(
            f"dt*max(|Delta|+D, 1) = {dt * max(abs(spec.delta) + spec.D, 1.0):.3g} >= {STEP_GUARD}",
            "simulate_adler",
        )
    if spec.sigma0_sq < 0:
        raise InvalidParameters("sigma0_sq must be >= 0", "simulate_adler")
    n = len(rngs)
    amp = np.sqrt(2.0 * spec.sigma0_sq * dt)
    theta = np.full(n, float(spec.theta_init))
    out = np.empty((n, 1, spec.n_samples))
    out[:, 0, 0] = theta
    step, sample = 0, 1
    for _, length in _chunks(spec.n_steps):
        g = _draw(rngs, length, 1)[:, :, 0]
        for k in range(length):
            theta = theta + (spec.delta + spec.D * np.sin(theta)) * dt + amp * g[k]
            step += 1
            if step % spec.stride == 0:
                out[:, 0, sample] = theta
                sample += 1
    return BlockPaths(thetas=out)


def _single_block(spec: SimulationSpec, rngs: list[np.random.Generator]) -> BlockPaths:
    params = spec.single
    assert params is not None
    dt = spec.dt
    if dt * params.gamma1 >= STEP_GUARD:
        raise StepTooLarge(f"dt*gamma1 = {dt * params.gamma1:.3g} >= {STEP_GUARD}", "simulate_single_sl")
    n = len(rngs)
    amp = spec.noise_scale * np.sqrt(1.5 * params.gamma2 * dt)
    decay = 1.0 - params.gamma1 * dt
    eta_out = np.empty((n, 1, spec.n_samples))
    theta_out = np.empty((n, 1, spec.n_samples))
    eta_last = np.full(n, float(spec.eta_init))
    theta_last = np.full(n, float(spec.theta_init))
    eta_out[:, 0, 0] = eta_last
    theta_out[:, 0, 0] = theta_last
    for start, length in _chunks(spec.n_steps):
        g = _draw(rngs, length, 2)
        # eta_{k+1} = (1 - gamma1 dt) eta_k + amp g_k, run as a first-order recursive filter
        eta, _ = lfilter([1.0], [1.0, -decay], amp * g[:, :, 0], axis=0, zi=(decay * eta_last)[None, :])
        theta = theta_last[None, :] + np.cumsum(amp * g[:, :, 1], axis=0)
        steps = np.arange(start + 1, start + length + 1)
        keep = steps % spec.stride == 0
        idx = steps[keep] // spec.stride
        eta_out[:, 0, idx] = eta[keep].T
        theta_out[:, 0, idx] = theta[keep].T
        eta_last, theta_last = eta[-1], theta[-1]
    return BlockPaths(thetas=theta_out, etas=eta_out)


@dataclass
class PairCoefficients:
    """Constant 2x2 coefficients of the pair equation solved for dphi/dt."""

    drift_linear: np.ndarray  # A^-1 P^R
    a_inv: np.ndarray
    lam_r: np.ndarray  # lambda1 r_m^2
    noise: np.ndarray  # A^-1 B (frozen noise)
    keldysh: np.ndarray  # i Pi^K / (r_m r_n), multiplicative mode
    lambda5_term: float  # i lambda5 (real)
    phi0: np.ndarray


def pair_coefficients(
    model: SelfEnergyModel, sol: SaddleSolution, couplings: QuarticCouplings, dt: float,
) -> PairCoefficients:
    if sol.theta0 is None:
        raise InvalidParameters("pair simulation needs a synchronized saddle", "simulate_pair_nonmarkovian")
    p, a = drift_matrices(model, sol)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > MAX_FRICTION_CONDITION:
        raise SingularFriction(f"friction matrix condition number {cond:.3e}", "simulate_pair_nonmarkovian")
    a_inv = np.linalg.inv(a)
    lam_r = couplings.lambda1 * np.array([sol.r1 ** 2, sol.r2 ** 2])
    rate = np.linalg.norm(a_inv @ p, 2) + 3.0 * np.linalg.norm(a_inv @ np.diag(lam_r), 2)
    if dt * rate >= STEP_GUARD:
        raise StepTooLarge(f"dt*rate = {dt * rate:.3g} >= {STEP_GUARD}", "simulate_pair_nonmarkovian")
    c, b = noise_matrix(model, sol.nu, sol.radii, couplings)
    lam5 = float((1j * couplings.lambda5).real)
    keldysh = c - np.diag([lam5, lam5])
    return PairCoefficients(
        drift_linear=a_inv @ p,
        a_inv=a_inv,
        lam_r=lam_r,
        noise=a_inv @ b,
        keldysh=keldysh,
        lambda5_term=lam5,
        phi0=saddle_point_field(sol.theta0),
    )


def _pair_block(spec: SimulationSpec, rngs: list[np.random.Generator]) -> BlockPaths:
    assert spec.model is not None and spec.saddle is not None and spec.couplings is not None
    co = pair_coefficients(spec.model, spec.saddle, spec.couplings, spec.dt)
    n = len(rngs)
    dt = spec.dt
    q = co.drift_linear
    ai = co.a_inv
    lam1, lam2 = co.lam_r
    g_static = co.noise
    k = co.keldysh
    scale = spec.noise_scale * np.sqrt(0.5 * dt)

    x1 = np.full(n, co.phi0[0] + spec.perturbation[0], dtype=complex)
    x2 = np.full(n, co.phi0[1] + spec.perturbation[1], dtype=complex)
    th1 = -np.angle(x1)
    th2 = -np.angle(x2)

    thetas = np.empty((n, 2, spec.n_samples))
    etas = np.empty((n, 2, spec.n_samples))
    phi = np.empty((n, 2, spec.n_samples), dtype=complex) if spec.keep_field else None

    def record(i: int) -> None:
        thetas[:, 0, i] = th1
        thetas[:, 1, i] = th2
        etas[:, 0, i] = np.abs(x1) - 1.0
        etas[:, 1, i] = np.abs(x2) - 1.0
        if phi is not None:
            phi[:, 0, i] = x1
            phi[:, 1, i] = x2

    record(0)
    step, sample = 0, 1
    for _, length in _chunks(spec.n_steps):
        g = _draw(rngs, length, 4)
        for j in range(length):
            w1 = (g[j, :, 0] + 1j * g[j, :, 1]) * scale
            w2 = (g[j, :, 2] + 1j * g[j, :, 3]) * scale
            u1 = lam1 * (x1.real ** 2 + x1.imag ** 2) * x1
            u2 = lam2 * (x2.real ** 2 + x2.imag ** 2) * x2
            f1 = -(q[0, 0] * x1 + q[0, 1] * x2) + ai[0, 0] * u1 + ai[0, 1] * u2
            f2 = -(q[1, 0] * x1 + q[1, 1] * x2) + ai[1, 0] * u1 + ai[1, 1] * u2
            if spec.multiplicative:
                c11 = k[0, 0].real + co.lambda5_term * (x1.real ** 2 + x1.imag ** 2)
                c22 = k[1, 1].real + co.lambda5_term * (x2.real ** 2 + x2.imag ** 2)
                b11 = np.sqrt(np.maximum(c11, 0.0))
                b21 = np.where(b11 > 0, k[1, 0] / np.where(b11 > 0, b11, 1.0), 0.0)
                b22 = np.sqrt(np.maximum(c22 - np.abs(b21) ** 2, 0.0))
                z1 = b11 * w1
                z2 = b21 * w1 + b22 * w2
                n1 = ai[0, 0] * z1 + ai[0, 1] * z2
                n2 = ai[1, 0] * z1 + ai[1, 1] * z2
            else:
                n1 = g_static[0, 0] * w1 + g_static[0, 1] * w2
                n2 = g_static[1, 0] * w1 + g_static[1, 1] * w2
            y1 = x1 + f1 * dt + n1
            y2 = x2 + f2 * dt + n2
            th1 = th1 - np.angle(y1 * np.conj(x1))
            th2 = th2 - np.angle(y2 * np.conj(x2))
            x1, x2 = y1, y2
            step += 1
            if step % spec.stride == 0:
                record(sample)
                sample += 1
    return BlockPaths(thetas=thetas, etas=etas, phi=phi)


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass
class BlockMoments:
    count: int
    mean: dict[str, np.ndarray]
    m2: dict[str, np.ndarray]
    replicate_weight: np.ndarray
    replicate_sum: dict[str, np.ndarray]
    replicate_sq: dict[str, np.ndarray]
    paths: dict[str, np.ndarray] | None = None
    phi: np.ndarray | None = None


def observables_of(spec: SimulationSpec, block: BlockPaths) -> dict[str, np.ndarray]:
    """Observable paths of a block, each (n_traj, n_samples)."""
    if spec.kind == SystemKind.ADLER:
        return {"theta_minus": block.thetas[:, 0]}
    if spec.kind == SystemKind.SINGLE:
        assert block.etas is not None
        return {"theta": block.thetas[:, 0], "eta": block.etas[:, 0]}
    assert block.etas is not None
    return {
        "theta_plus": block.thetas[:, 0] + block.thetas[:, 1],
        "theta_minus": block.thetas[:, 0] - block.thetas[:, 1],
        "eta1": block.etas[:, 0],
        "eta2": block.etas[:, 1],
    }


@dataclass(frozen=True)
class BlockJob:
    spec: SimulationSpec
    master_seed: int
    indices: range
    n_boot: int
    keep_paths: bool


def _run_block(job: BlockJob) -> BlockMoments:
    seeds = [trajectory_seed(job.master_seed, i) for i in job.indices]
    block = integrate_block(job.spec, seeds)
    obs = observables_of(job.spec, block)
    mean = {name: x.mean(axis=0) for name, x in obs.items()}
    m2 = {name: ((x - mean[name]) ** 2).sum(axis=0) for name, x in obs.items()}
    # Poisson bootstrap: replicate b counts trajectory i weight[b, i] times
    weights = np.stack([replicate_weights(job.master_seed, i, job.n_boot) for i in job.indices], axis=1)
    return BlockMoments(
        count=len(seeds), mean=mean, m2=m2,
        replicate_weight=weights.sum(axis=1),
        replicate_sum={name: weights @ x for name, x in obs.items()},
        replicate_sq={name: weights @ (x * x) for name, x in obs.items()},
        paths=obs if job.keep_paths else None,
        phi=block.phi if job.keep_paths else None,
    )


def merge_moments(
    counts: np.ndarray, means: np.ndarray, m2s: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Combine per-block (count, mean, M2) rows into ensemble (count, mean, M2)."""
    total = float(np.sum(counts))
    mean = np.einsum("b,bt->t", counts, means) / total
    m2 = m2s.sum(axis=0) + np.einsum("b,bt->t", counts, (means - mean) ** 2)
    return total, mean, m2


def run_ensemble(
    sim: SimulationSpec,
    n_traj: int,
    master_seed: int,
    stride: int | None = None,
    threads: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    keep_paths: bool = False,
    n_boot: int = DEFAULT_REPLICATES,
) -> EnsembleStats:
    """Run n_traj seeded trajectories and accumulate mean/variance per observable.

    Trajectories are grouped in fixed-size blocks merged in index order, so the
    result is bit-identical for any worker count.  Each trajectory also draws
    its own bootstrap weights, so variance fits can be resampled over
    trajectories without storing the paths.
    """
    if n_traj < 1:
        raise InvalidParameters(f"n_traj must be >= 1, got {n_traj}", "run_ensemble")
    if block_size < 1:
        raise InvalidParameters(f"block_size must be >= 1, got {block_size}", "run_ensemble")
    if n_boot < 0:
        raise InvalidParameters(f"n_boot must be >= 0, got {n_boot}", "run_ensemble")
    spec = replace(sim, stride=stride) if stride is not None else sim
    if keep_paths and spec.kind == SystemKind.PAIR:
        spec = replace(spec, keep_field=True)
    jobs = [
        BlockJob(spec, int(master_seed), range(i, min(i + block_size, n_traj)), n_boot, keep_paths)
        for i in range(0, n_traj, block_size)
    ]
    logger.debug("ensemble %s: %d trajectories in %d blocks on %d workers", spec.kind.value, n_traj, len(jobs), threads)

    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(job) for job in jobs]

    counts = np.array([b.count for b in blocks], dtype=float)
    mean: dict[str, np.ndarray] = {}
    var: dict[str, np.ndarray] = {}
    replicate_sum: dict[str, np.ndarray] = {}
    replicate_sq: dict[str, np.ndarray] = {}
    for name in spec.observables:
        total, mu, m2 = merge_moments(
            counts, np.stack([b.mean[name] for b in blocks]), np.stack([b.m2[name] for b in blocks]),
        )
        mean[name] = mu
        var[name] = m2 / (total - 1.0) if total > 1 else np.zeros_like(mu)
        replicate_sum[name] = np.sum([b.replicate_sum[name] for b in blocks], axis=0)
        replicate_sq[name] = np.sum([b.replicate_sq[name] for b in blocks], axis=0)

    paths = None
    phi = None
    if keep_paths:
        paths = {name: np.concatenate([b.paths[name] for b in blocks]) for name in spec.observables}
        if spec.keep_field:
            phi = np.concatenate([b.phi for b in blocks])
    return EnsembleStats(
        times=spec.times,
        mean=mean,
        var=var,
        n_traj=n_traj,
        master_seed=int(master_seed),
        dt=spec.dt,
        replicate_weight=np.sum([b.replicate_weight for b in blocks], axis=0),
        replicate_sum=replicate_sum,
        replicate_sq=replicate_sq,
        paths=paths,
        phi=phi,
    )


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------

def autocorrelation(
    trajectories: np.ndarray | Sequence[Trajectory],
    tau_max: float,
    sample_dt: float | None = None,
    burn_in_fraction: float = 0.0,
) -> CorrelationTable:
    """C_mn(tau) = (1/T) int dt < conj(phi_m(t)) phi_n(t + tau) >, averaged over paths.

    ``trajectories`` is either a complex array (n_traj, 2, n_samples) with
    ``sample_dt`` given, or trajectories that kept their complex field.
    """
    if isinstance(trajectories, np.ndarray):
        paths = trajectories
        if sample_dt is None:
            raise InvalidParameters("sample_dt is required for raw arrays", "autocorrelation")
    else:
        trajs = list(trajectories)
        if not trajs or any(t.phi is None for t in trajs):
            raise InvalidParameters("trajectories must carry their complex field", "autocorrelation")
        paths = np.stack([t.phi for t in trajs])
        sample_dt = float(trajs[0].times[1] - trajs[0].times[0])
    paths = np.asarray(paths, dtype=complex)
    if paths.ndim == 2:
        paths = paths[:, None, :]
    start = int(np.floor(burn_in_fraction * paths.shape[-1]))
    seg = paths[..., start:]
    n = seg.shape[-1]
    span = (n - 1) * sample_dt
    if tau_max > span / 4.0:
        raise InsufficientLength(
            f"tau_max={tau_max} exceeds a quarter of the stationary record ({span:.4g})", "autocorrelation",
        )
    n_lag = int(np.floor(tau_max / sample_dt + 1e-9)) + 1
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spectra = np.fft.fft(seg, n=nfft, axis=-1)
    modes = seg.shape[1]
    overlap = (n - np.arange(n_lag)).astype(float)
    values = np.empty((n_lag, modes, modes), dtype=complex)
    for m in range(modes):
        for k in range(modes):
            cross = np.fft.ifft(np.conj(spectra[:, m]) * spectra[:, k], axis=-1)[:, :n_lag]
            values[:, m, k] = cross.mean(axis=0) / overlap
    return CorrelationTable(taus=np.arange(n_lag) * sample_dt, values=values, n_traj=seg.shape[0])


def fit_correlation_time(table: CorrelationTable, m: int = 0, n: int = 0) -> tuple[float, float]:
    """Exponential fit |C_mn(tau)| ~ a exp(-tau / tau_c); returns (tau_c, standard error)."""
    taus = table.taus
    y = np.abs(table.component(m, n))
    if y.size < 3:
        raise InsufficientLength("need at least 3 lags to fit a correlation time", "fit_correlation_time")
    below = np.nonzero(y < y[0] / np.e)[0]
    guess = taus[below[0]] if below.size else taus[-1]

    def decay(t: np.ndarray, a: float, tau_c: float) -> np.ndarray:
        return a * np.exp(-t / tau_c)

    popt, pcov = curve_fit(decay, taus, y, p0=(y[0], max(guess, taus[1])), maxfev=10000)
    err = float(np.sqrt(pcov[1, 1])) if np.isfinite(pcov[1, 1]) else float("nan")
    return float(popt[1]), err
