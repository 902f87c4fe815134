"""Stationary saddle-point equations: radius, synchronization frequency, phase offset."""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import root

from limitcycle_sync.core.errors import InvalidParameters, NoLimitCycle, SolverDiverged
from limitcycle_sync.models import Branch
from limitcycle_sync.models.params import PairParams, QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.saddle import NoSync, SaddleSolution
from limitcycle_sync.models.self_energy import MarkovianPair, SelfEnergyModel

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-9
START_THETAS = (0.5 * np.pi, np.pi, 1.5 * np.pi)
PHASE_SNAP = 1e-12


def wrap_phase(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    wrapped = float(np.pi - np.mod(np.pi - theta, 2.0 * np.pi))
    # rounding can land an angle just above pi on the excluded end
    return np.pi if wrapped <= -np.pi + PHASE_SNAP else wrapped


def solve_single(params: SingleOscillatorParams, couplings: QuarticCouplings) -> tuple[float, float]:
    """Return (nu, r) of a single oscillator with self-energy Pi^R = i gamma1 / 2.

    r^2 = (nu - omega0 - Pi^R) / lambda1 must be real and positive.
    """
    if couplings.lambda1.imag >= 0:
        raise NoLimitCycle("Im lambda1 must be negative (two-photon loss) for a limit cycle", "solve_single")
    r_sq = (0.5 * params.gamma1) / (-couplings.lambda1.imag)
    if not r_sq > 0:
        raise NoLimitCycle(f"r^2 = {r_sq} is not positive", "solve_single")
    nu = params.omega0 + couplings.lambda1.real * r_sq
    return float(nu), float(np.sqrt(r_sq))


def solve_pair_markovian(params: PairParams) -> SaddleSolution:
    """Closed-form saddle point of the Markovian pair."""
    delta, D = params.delta, params.D
    mean = 0.5 * (params.omega1 + params.omega2)
    omegas = (params.omega1, params.omega2)
    if D > 0 and abs(delta) <= D:
        root_term = np.sqrt(max(1.0 - (delta / D) ** 2, 0.0))
        r_sq = (params.gamma1 - D + D * root_term) / params.gamma2
        if r_sq <= 0:
            raise NoLimitCycle(f"r^2 = {r_sq:.6g} <= 0 inside the tongue", "solve_pair_markovian")
        # stable branch: sin(theta0) = -delta/D with D cos(theta0) < 0
        theta0 = wrap_phase(np.arctan2(-delta / D + 0.0, -root_term))
        sol = SaddleSolution(
            nu=mean, r1=float(np.sqrt(r_sq)), r2=float(np.sqrt(r_sq)), theta0=theta0,
            branch=Branch.SYNCHRONIZED, omegas=omegas,
        )
        model = MarkovianPair(gamma1=params.gamma1, D=D)
        couplings = QuarticCouplings.stuart_landau(params.gamma2)
        residual = float(np.max(np.abs(saddle_residuals(model, omegas, couplings, _unknowns(sol)))))
        eigs = stability_of_saddle(sol, model, couplings)
        return SaddleSolution(
            nu=sol.nu, r1=sol.r1, r2=sol.r2, theta0=theta0, branch=Branch.SYNCHRONIZED,
            residual=residual, stability=tuple(eigs), omegas=omegas,
        )

    r_sq = (params.gamma1 - D) / params.gamma2
    if r_sq <= 0:
        raise NoLimitCycle(f"r^2 = (gamma1 - D)/gamma2 = {r_sq:.6g} <= 0", "solve_pair_markovian")
    r = float(np.sqrt(r_sq))
    return SaddleSolution(nu=mean, r1=r, r2=r, theta0=None, branch=Branch.UNSYNCHRONIZED, omegas=omegas)


def _unknowns(sol: SaddleSolution) -> np.ndarray:
    return np.array([sol.nu, sol.theta0 or 0.0, sol.r1, sol.r2], dtype=float)


def saddle_residuals(
    model: SelfEnergyModel,
    omegas: tuple[float, float],
    couplings: QuarticCouplings,
    x: np.ndarray,
) -> np.ndarray:
    """Complex residuals (R1, R2) of the synchronized saddle equations at x = (nu, theta0, r1, r2)."""
    nu, theta, r1, r2 = x
    a, b = model.retarded(nu)
    lam = couplings.lambda1
    rho = r2 / r1
    res1 = nu - omegas[0] - a - np.exp(1j * theta) * b * rho - lam * r1 ** 2
    res2 = nu - omegas[1] - a - np.exp(-1j * theta) * b / rho - lam * r2 ** 2
    return np.array([res1, res2], dtype=complex)


def _residual_and_jacobian(
    x: np.ndarray, model: SelfEnergyModel, omegas: tuple[float, float], couplings: QuarticCouplings,
) -> tuple[np.ndarray, np.ndarray]:
    nu, theta, r1, r2 = x
    a, b = model.retarded(nu)
    da, db = model.retarded_derivative(nu)
    lam = couplings.lambda1
    ep, em = np.exp(1j * theta), np.exp(-1j * theta)
    res = saddle_residuals(model, omegas, couplings, x)
    jac = np.array([
        [1.0 - da - ep * db * r2 / r1, -1j * ep * b * r2 / r1, ep * b * r2 / r1 ** 2 - 2.0 * lam * r1, -ep * b / r1],
        [1.0 - da - em * db * r1 / r2, 1j * em * b * r1 / r2, -em * b / r2, em * b * r1 / r2 ** 2 - 2.0 * lam * r2],
    ], dtype=complex)
    f = np.array([res[0].real, res[0].imag, res[1].real, res[1].imag])
    j = np.vstack([jac[0].real, jac[0].imag, jac[1].real, jac[1].imag])
    return f, j


def _initial_radii(model: SelfEnergyModel, couplings: QuarticCouplings, nu: float, delta: float) -> float:
    """Markovian locked amplitude with gamma1 and D read off Pi^R(nu): D = -2 Im Pi^R_12."""
    a, b = model.retarded(nu)
    lam_im = couplings.lambda1.imag
    D = -2.0 * b.imag
    root_term = np.sqrt(max(1.0 - (delta / D) ** 2, 0.0)) if D > 0 else 0.0
    r_sq = (a.imag + 0.5 * D * root_term) / -lam_im if lam_im else 0.0
    if not r_sq > 0:
        r_sq = abs(a.imag) / abs(lam_im) if lam_im else 1.0
    return float(np.sqrt(max(r_sq, 1e-6)))


def _canonical(x: np.ndarray) -> np.ndarray:
    nu, theta, r1, r2 = x
    # (r, theta) -> (-r, theta + pi) leaves the equations invariant
    if r1 < 0:
        r1, theta = -r1, theta + np.pi
    if r2 < 0:
        r2, theta = -r2, theta + np.pi
    return np.array([nu, wrap_phase(theta), r1, r2])


def saddle_roots(
    model: SelfEnergyModel,
    omega1: float,
    omega2: float,
    couplings: QuarticCouplings,
    n_starts: int = 9,
    tol: float = RESIDUAL_TOLERANCE,
    max_iter: int = 400,
) -> tuple[list[SaddleSolution], int]:
    """Multi-start search for every synchronized root; returns (roots, n_starts_tried).

    Raises SolverDiverged when no start produced finite iterates.
    """
    omegas = (float(omega1), float(omega2))
    width = model.frequency_scale()
    grid = np.linspace(min(omegas) - width, max(omegas) + width, n_starts)
    roots: list[SaddleSolution] = []
    starts = 0
    finite = 0
    for nu0 in grid:
        for theta0 in START_THETAS:
            starts += 1
            try:
                r0 = _initial_radii(model, couplings, nu0, omegas[0] - omegas[1])
            except Exception as exc:
                logger.debug("start nu=%.6g theta=%.3f: cannot initialize (%s)", nu0, theta0, exc)
                continue
            x0 = np.array([nu0, theta0, r0, r0])
            sol = None
            for method in ("hybr", "lm"):
                try:
                    sol = root(
                        _residual_and_jacobian, x0, args=(model, omegas, couplings),
                        jac=True, method=method, options={"xtol": 1e-14} if method == "hybr" else {"xtol": 1e-14, "maxiter": max_iter},
                    )
                except Exception as exc:
                    logger.debug("start nu=%.6g theta=%.3f %s failed: %s", nu0, theta0, method, exc)
                    sol = None
                    continue
                if np.all(np.isfinite(sol.x)):
                    break
            if sol is None or not np.all(np.isfinite(sol.x)):
                continue
            finite += 1
            x = _canonical(sol.x)
            if x[2] == 0 or x[3] == 0:
                continue
            try:
                residual = float(np.max(np.abs(saddle_residuals(model, omegas, couplings, x))))
            except Exception:
                continue
            if residual >= tol:
                logger.debug("start nu=%.6g theta=%.3f: residual %.3e above tolerance", nu0, theta0, residual)
                continue
            if any(_same_root(x, _unknowns(r)) for r in roots):
                continue
            candidate = SaddleSolution(
                nu=float(x[0]), r1=float(x[2]), r2=float(x[3]), theta0=float(x[1]),
                branch=Branch.SYNCHRONIZED, residual=residual, omegas=omegas,
            )
            eigs = stability_of_saddle(candidate, model, couplings)
            roots.append(SaddleSolution(
                nu=candidate.nu, r1=candidate.r1, r2=candidate.r2, theta0=candidate.theta0,
                branch=Branch.SYNCHRONIZED, residual=residual, stability=tuple(eigs), omegas=omegas,
            ))
            logger.debug("root nu=%.10g theta0=%.6f r=(%.6g, %.6g) stable=%s", x[0], x[1], x[2], x[3], roots[-1].stable)
    if finite == 0:
        raise SolverDiverged(f"all {starts} starts diverged", "solve_pair_nonmarkovian")
    roots.sort(key=lambda r: r.nu)
    return roots, starts


def _same_root(x: np.ndarray, y: np.ndarray, atol: float = 1e-6) -> bool:
    dtheta = abs(wrap_phase(x[1] - y[1]))
    return abs(x[0] - y[0]) < atol and dtheta < atol and abs(x[2] - y[2]) < atol and abs(x[3] - y[3]) < atol


def solve_pair_nonmarkovian(
    model: SelfEnergyModel,
    omega1: float,
    omega2: float,
    couplings: QuarticCouplings,
    n_starts: int = 9,
    tol: float = RESIDUAL_TOLERANCE,
) -> SaddleSolution | NoSync:
    """Stable synchronized root of the frequency-dependent saddle equations.

    Among stable roots the lowest nu wins; NoSync when none is stable.
    """
    roots, starts = saddle_roots(model, omega1, omega2, couplings, n_starts=n_starts, tol=tol)
    stable = [r for r in roots if r.stable]
    if not roots:
        return NoSync(starts=starts, converged=0, reason="no start converged below tolerance")
    if not stable:
        return NoSync(starts=starts, converged=len(roots), reason="no converged root is stable", roots=tuple(roots))
    return stable[0]


def linearized_drift(
    sol: SaddleSolution, model: SelfEnergyModel, couplings: QuarticCouplings,
) -> np.ndarray:
    """Real 4x4 Jacobian of the deterministic drift at the saddle.

    Acts on (Re dphi_1, Re dphi_2, Im dphi_1, Im dphi_2).
    """
    if sol.omegas is None:
        raise InvalidParameters("saddle solution carries no bare frequencies", "stability_of_saddle")
    if sol.theta0 is None:
        raise InvalidParameters("stability requires a synchronized solution", "stability_of_saddle")
    p, a = drift_matrices(model, sol)
    phi = saddle_point_field(sol.theta0)
    lam_r = couplings.lambda1 * np.array([sol.r1 ** 2, sol.r2 ** 2])
    a_inv = np.linalg.inv(a)
    m = a_inv @ (-p + np.diag(2.0 * lam_r * np.abs(phi) ** 2))
    n = a_inv @ np.diag(lam_r * phi ** 2)
    return np.block([
        [(m + n).real, -(m - n).imag],
        [(m + n).imag, (m - n).real],
    ])


def stability_of_saddle(
    sol: SaddleSolution, model: SelfEnergyModel, couplings: QuarticCouplings,
) -> list[complex]:
    """Eigenvalues of the real-linearized deterministic Langevin drift at the saddle."""
    eigs = np.linalg.eigvals(linearized_drift(sol, model, couplings))
    return sorted((complex(e) for e in eigs), key=lambda e: (-e.real, e.imag))


def drift_matrices(model: SelfEnergyModel, sol: SaddleSolution) -> tuple[np.ndarray, np.ndarray]:
    """Return (P^R(nu), A) of the rescaled pair equation A dphi/dt = -[P^R phi - ...]."""
    pir11, pir12 = model.retarded(sol.nu)
    d11, d12 = model.retarded_derivative(sol.nu)
    r = np.array([sol.r1, sol.r2])
    weight = np.outer(1.0 / r, r)  # r_n / r_m
    pir = np.array([[pir11, pir12], [pir12, pir11]]) * weight
    dpir = np.array([[d11, d12], [d12, d11]]) * weight
    omegas = np.asarray(sol.omegas, dtype=float)
    p = np.diag(sol.nu - omegas).astype(complex) - pir
    a = 1j * (np.eye(2) - dpir)
    return p, a


def saddle_point_field(theta0: float) -> np.ndarray:
    """Rescaled fields at the fixed point, phi2 / phi1 = exp(i theta0)."""
    return np.array([np.exp(-0.5j * theta0), np.exp(0.5j * theta0)])
