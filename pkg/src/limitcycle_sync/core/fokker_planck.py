"""Stationary phase-difference distribution of the noisy Adler equation.

d/dtheta [(Delta + D sin theta) P] = sigma0_sq d^2P/dtheta^2 on the circle with a
constant probability current.  Two independent solvers: a Fourier recursion
closed by a continued fraction, and a finite-volume grid with Richardson
extrapolation.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve
from scipy.special import i0e

from limitcycle_sync.core.errors import InvalidParameters, NotConverged, SingularSystem
from limitcycle_sync.models.distribution import PhaseDistribution, phase_grid

logger = logging.getLogger(__name__)

CF_TOLERANCE = 1e-10


def _cf_coefficients(Delta: float, D: float, sigma0_sq: float, n_harmonics: int) -> np.ndarray:
    """Fourier coefficients c_1..c_K of 2pi P (c_0 = 1).

    (2 s k + 2i Delta) c_k + D c_{k-1} - D c_{k+1} = 0, so the ratios
    R_k = c_k / c_{k-1} obey R_k = -D / (2 s k + 2i Delta - D R_{k+1}).
    """
    ratios = np.zeros(n_harmonics + 2, dtype=complex)
    for k in range(n_harmonics, 0, -1):
        ratios[k] = -D / (2.0 * sigma0_sq * k + 2j * Delta - D * ratios[k + 1])
    coeffs = np.cumprod(ratios[1:n_harmonics + 1])
    return coeffs


def _density_from_coefficients(coeffs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    k = np.arange(1, coeffs.size + 1)
    series = np.exp(1j * np.outer(grid, k)) @ coeffs
    return (1.0 + 2.0 * series.real) / (2.0 * np.pi)


def _finalize(density: np.ndarray, h: float) -> np.ndarray:
    density = np.clip(density, 0.0, None)
    return density / (density.sum() * h)


def stationary_adler_cf(
    Delta: float,
    D: float,
    sigma0_sq: float,
    n_harmonics: int = 128,
    n_bins: int = 512,
) -> PhaseDistribution:
    """Continued-fraction solution, checked against a run with twice the harmonics."""
    if not sigma0_sq > 0:
        raise InvalidParameters(f"sigma0_sq must be > 0, got {sigma0_sq}", "stationary_adler_cf")
    if n_harmonics < 8:
        raise InvalidParameters(f"n_harmonics must be >= 8, got {n_harmonics}", "stationary_adler_cf")
    grid = phase_grid(n_bins)
    h = 2.0 * np.pi / n_bins
    coarse = _density_from_coefficients(_cf_coefficients(Delta, D, sigma0_sq, n_harmonics), grid)
    fine = _density_from_coefficients(_cf_coefficients(Delta, D, sigma0_sq, 2 * n_harmonics), grid)
    change = float(np.max(np.abs(fine - coarse)))
    logger.debug("continued fraction K=%d: doubling change %.3e", n_harmonics, change)
    if not np.isfinite(change) or change >= CF_TOLERANCE:
        raise NotConverged(
            f"doubling n_harmonics={n_harmonics} changed the density by {change:.3e}", "stationary_adler_cf",
        )
    return PhaseDistribution(
        grid=grid,
        density=_finalize(fine, h),
        method="continued-fraction",
        meta={"Delta": Delta, "D": D, "sigma0_sq": sigma0_sq, "n_harmonics": n_harmonics, "doubling_change": change},
    )


def _grid_solve(Delta: float, D: float, sigma0_sq: float, n: int) -> np.ndarray:
    """Vertex-centred finite volumes with central fluxes; unknowns P_0..P_{n-1} and J."""
    h = 2.0 * np.pi / n
    half = -np.pi + (np.arange(n) + 0.5) * h
    drift = Delta + D * np.sin(half)
    j = np.arange(n)
    jp = (j + 1) % n
    # J_{j+1/2} = a (P_j + P_{j+1}) / 2 - s (P_{j+1} - P_j) / h = J
    rows = np.concatenate([j, j, j, np.full(n, n)])
    cols = np.concatenate([j, jp, np.full(n, n), j])
    vals = np.concatenate([
        0.5 * drift + sigma0_sq / h,
        0.5 * drift - sigma0_sq / h,
        -np.ones(n),
        np.full(n, h),
    ])
    matrix = sparse.csc_matrix((vals, (rows, cols)), shape=(n + 1, n + 1))
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    solution = spsolve(matrix, rhs)
    if not np.all(np.isfinite(solution)):
        raise SingularSystem(f"finite-volume system singular at n_grid={n}", "stationary_adler_grid")
    return solution[:n]


def stationary_adler_grid(Delta: float, D: float, sigma0_sq: float, n_grid: int = 2048) -> PhaseDistribution:
    """Grid oracle; Richardson-combines n_grid and 2 n_grid solutions."""
    if not sigma0_sq > 0:
        raise InvalidParameters(f"sigma0_sq must be > 0, got {sigma0_sq}", "stationary_adler_grid")
    if n_grid < 256:
        raise InvalidParameters(f"n_grid must be >= 256, got {n_grid}", "stationary_adler_grid")
    h = 2.0 * np.pi / n_grid
    coarse = _grid_solve(Delta, D, sigma0_sq, n_grid)
    fine = _grid_solve(Delta, D, sigma0_sq, 2 * n_grid)[::2]
    extrapolated = (4.0 * fine - coarse) / 3.0
    return PhaseDistribution(
        grid=phase_grid(n_grid),
        density=_finalize(extrapolated, h),
        method="finite-volume",
        meta={"Delta": Delta, "D": D, "sigma0_sq": sigma0_sq, "n_grid": n_grid},
    )


def boltzmann_density(D: float, sigma0_sq: float, grid: np.ndarray) -> np.ndarray:
    """Zero-detuning density exp(-D cos theta / s) / (2 pi I0(D / s))."""
    x = D / sigma0_sq
    return np.exp(-x * (np.cos(grid) + 1.0)) / (2.0 * np.pi * i0e(x))


def liouvillian_branch(gamma2: float, l: int) -> float:
    """Phase-diffusion eigenvalue 3 gamma2 l^2 / 4 of a single oscillator."""
    return 0.75 * gamma2 * l * l
