"""Two-mode Lindblad master equation for the dissipatively coupled Stuart-Landau pair."""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply, norm as sparse_norm, splu
from scipy.special import gammaln

from limitcycle_sync.core.errors import CutoffDominated, CutoffTooSmall, NotConverged
from limitcycle_sync.models import SteadyStateMethod
from limitcycle_sync.models.distribution import PhaseDistribution, phase_grid
from limitcycle_sync.models.lindblad import DensityMatrix, FockSpace, Liouvillian
from limitcycle_sync.models.params import PairParams

logger = logging.getLogger(__name__)

BOUNDARY_POPULATION = 1e-4
MIN_EIGENVALUE = -1e-8


def annihilation(cutoff: int) -> sparse.csr_matrix:
    """Truncated a with a|n> = sqrt(n)|n-1>."""
    return sparse.diags(np.sqrt(np.arange(1, cutoff, dtype=float)), 1, format="csr")


def mode_operators(space: FockSpace) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """(a1, a2) on the two-mode space, basis index n1 * cutoff + n2."""
    a = annihilation(space.cutoff)
    eye = sparse.identity(space.cutoff, format="csr")
    return sparse.kron(a, eye, format="csr"), sparse.kron(eye, a, format="csr")


def _dissipator(jump: sparse.csr_matrix, eye: sparse.csr_matrix) -> sparse.csr_matrix:
    jdj = (jump.conj().T @ jump).tocsr()
    return (
        sparse.kron(jump, jump.conj(), format="csr")
        - 0.5 * sparse.kron(jdj, eye, format="csr")
        - 0.5 * sparse.kron(eye, jdj.T, format="csr")
    )


def build_liouvillian(params: PairParams, space: FockSpace) -> Liouvillian:
    """Liouvillian in the frame rotating at (omega1 + omega2) / 2.

    H = (Delta/2)(n1 - n2); jumps sqrt(gamma1) a_n^dagger, sqrt(gamma2) a_n^2 and
    sqrt(D)(a1 + a2).  Every dissipator is trace preserving on the truncated
    space, so the identity is an exact left null vector.
    """
    n_mean = params.photon_number
    if n_mean > 0.5 * space.cutoff:
        raise CutoffTooSmall(
            f"mean photon number {n_mean:.3g} exceeds half the cutoff {space.cutoff}", "build_liouvillian",
        )
    a1, a2 = mode_operators(space)
    eye = sparse.identity(space.hilbert_dim, format="csr")
    n1 = (a1.T @ a1).tocsr()
    n2 = (a2.T @ a2).tocsr()
    h = 0.5 * params.delta * (n1 - n2)
    lv = -1j * (sparse.kron(h, eye, format="csr") - sparse.kron(eye, h.T, format="csr"))
    jumps = [
        np.sqrt(params.gamma1) * a1.T.tocsr(),
        np.sqrt(params.gamma1) * a2.T.tocsr(),
        np.sqrt(params.gamma2) * (a1 @ a1).tocsr(),
        np.sqrt(params.gamma2) * (a2 @ a2).tocsr(),
    ]
    if params.D > 0:
        jumps.append(np.sqrt(params.D) * (a1 + a2).tocsr())
    for jump in jumps:
        lv = lv + _dissipator(jump, eye)
    lv = lv.tocsr()
    lv.eliminate_zeros()
    logger.debug("Liouvillian N=%d: dim %d, nnz %d", space.cutoff, lv.shape[0], lv.nnz)
    return Liouvillian(matrix=lv, space=space, params=params)


def charge_sector(space: FockSpace) -> np.ndarray:
    """Superoperator indices of |n1 n2><m1 m2| with n1 + n2 = m1 + m2.

    The Liouvillian conserves the ket/bra total-number difference; the steady
    state lives in the zero sector.
    """
    total = space.total_number()
    d = space.hilbert_dim
    ket, bra = np.nonzero(total[:, None] == total[None, :])
    return ket * d + bra


def _initial_vector(space: FockSpace, sector: np.ndarray, n_mean: float) -> np.ndarray:
    """Diagonal product of Poisson populations, restricted to the sector."""
    n = np.arange(space.cutoff)
    log_p = n * np.log(max(n_mean, 1e-3)) - gammaln(n + 1.0)
    p = np.exp(log_p - log_p.max())
    p /= p.sum()
    rho = np.diag(np.kron(p, p)).astype(complex)
    return rho.ravel()[sector]


def _trace_row(space: FockSpace, sector: np.ndarray) -> np.ndarray:
    d = space.hilbert_dim
    return (sector // d == sector % d).astype(float)


def _solve_nullspace(block: sparse.csr_matrix, trace_row: np.ndarray) -> np.ndarray:
    """Direct sparse solve with the unit-trace condition folded into the first row."""
    weight = float(np.mean(np.abs(block.data))) if block.nnz else 1.0
    m = block.shape[0]
    diag_idx = np.nonzero(trace_row)[0]
    patch = sparse.csr_matrix(
        (weight * np.ones(diag_idx.size), (np.zeros(diag_idx.size, dtype=int), diag_idx)), shape=(m, m),
    )
    system = (block + patch).tocsc()
    rhs = np.zeros(m, dtype=complex)
    rhs[0] = weight
    # row 0 is <00|L(rho)|00>; it holds at the steady state, so adding the trace keeps the solution
    lu = splu(system)
    return lu.solve(rhs)


def _solve_propagation(
    block: sparse.csr_matrix, x0: np.ndarray, tol: float, scale: float, rate: float, max_chunks: int,
) -> np.ndarray:
    x = x0
    chunk = 10.0 / rate
    for i in range(max_chunks):
        x = expm_multiply(block * chunk, x)
        resid = float(np.linalg.norm(block @ x)) / (scale * max(np.linalg.norm(x), 1e-300))
        logger.debug("propagation chunk %d (t=%.4g): relative residual %.3e", i + 1, (i + 1) * chunk, resid)
        if resid < tol:
            return x
    raise NotConverged(
        f"propagation did not reach residual {tol:.1e} after {max_chunks} chunks", "steady_state",
    )


def steady_state(
    lv: Liouvillian,
    method: SteadyStateMethod = SteadyStateMethod.NULL_SPACE,
    tol: float = 1e-9,
    max_chunks: int = 400,
) -> DensityMatrix:
    """Steady state with ||L(rho)|| < tol ||L||, Hermitian, unit trace and positive."""
    space = lv.space
    d = space.hilbert_dim
    sector = charge_sector(space)
    block = lv.matrix[sector][:, sector].tocsr()
    scale = float(sparse_norm(block))
    trace_row = _trace_row(space, sector)

    if method == SteadyStateMethod.NULL_SPACE:
        x = _solve_nullspace(block, trace_row)
    else:
        rate = max(lv.params.D, lv.params.gamma2, 1e-3 * lv.params.gamma1)
        x = _solve_propagation(
            block, _initial_vector(space, sector, lv.params.photon_number), tol, scale, rate, max_chunks,
        )

    flat = np.zeros(d * d, dtype=complex)
    flat[sector] = x
    rho = flat.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or tr <= 0:
        raise NotConverged(f"steady state has trace {tr}", "steady_state")
    rho = rho / tr

    residual = float(np.linalg.norm(block @ rho.ravel()[sector])) / (scale * np.linalg.norm(rho))
    if residual >= tol:
        raise NotConverged(f"steady-state residual {residual:.3e} above {tol:.1e}", "steady_state")
    result = DensityMatrix(matrix=rho, space=space, residual=residual, method=method.value)
    min_eig = result.min_eigenvalue
    if min_eig < MIN_EIGENVALUE:
        raise NotConverged(f"steady state has eigenvalue {min_eig:.3e}", "steady_state")
    p1, p2 = result.mode_populations()
    edge = float(max(p1[-1], p2[-1]))
    if edge > BOUNDARY_POPULATION:
        raise CutoffDominated(
            f"population {edge:.3e} at the cutoff state n={space.cutoff - 1}", "steady_state",
        )
    result.meta.update(boundary_population=edge, min_eigenvalue=min_eig)
    logger.debug("steady state (%s): residual %.3e, edge population %.3e", method.value, residual, edge)
    return result


def phase_coefficients(rho: DensityMatrix) -> np.ndarray:
    """c_k = sum_{n1,n2} <n1+k, n2| rho |n1, n2+k> for k = 0..N-1."""
    N = rho.space.cutoff
    r = rho.matrix.reshape(N, N, N, N)
    coeffs = np.zeros(N, dtype=complex)
    for k in range(N):
        # diagonal of r[n1 + k, :, n1, k:] is r[n1 + k, n2, n1, n2 + k]
        coeffs[k] = sum(np.trace(r[n1 + k, :N - k, n1, k:]) for n1 in range(N - k))
    return coeffs


def phase_distribution_lme(rho: DensityMatrix, n_bins: int = 64) -> PhaseDistribution:
    """P(theta_-) = (1/2pi) sum_k exp(i k theta_-) c_k from phase states <n|theta> = exp(-i n theta)/sqrt(2pi)."""
    coeffs = phase_coefficients(rho)
    grid = phase_grid(n_bins)
    k = np.arange(1, coeffs.size)
    series = np.exp(1j * np.outer(grid, k)) @ coeffs[1:]
    density = (coeffs[0].real + 2.0 * series.real) / (2.0 * np.pi)
    return PhaseDistribution(grid=grid, density=density, method="lindblad", meta={"cutoff": rho.space.cutoff})


def phase_distribution_grid(rho: DensityMatrix, n_bins: int = 64, n_sum: int | None = None) -> PhaseDistribution:
    """Direct integration of <theta1 theta2|rho|theta1 theta2> along theta1 - theta2 = theta_-."""
    N = rho.space.cutoff
    m = n_sum or 2 * N + 1
    grid = phase_grid(n_bins)
    theta2 = 2.0 * np.pi * np.arange(m) / m
    theta1 = grid[:, None] + theta2[None, :]
    n = np.arange(N)
    u1 = np.exp(-1j * theta1[..., None] * n) / np.sqrt(2.0 * np.pi)
    u2 = np.exp(-1j * theta2[:, None] * n) / np.sqrt(2.0 * np.pi)
    # <n1 n2|theta1 theta2> for every (theta_-, theta2) pair
    u = (u1[..., :, None] * u2[None, :, None, :]).reshape(n_bins * m, N * N)
    q = np.real(np.sum(np.conj(u) * (u @ rho.matrix.T), axis=1)).reshape(n_bins, m)
    density = q.sum(axis=1) * (2.0 * np.pi / m)
    return PhaseDistribution(grid=grid, density=density, method="lindblad-grid", meta={"cutoff": N})


def number_distribution(rho: DensityMatrix) -> dict[str, np.ndarray]:
    """Marginal Fock populations per mode and of the total photon number."""
    N = rho.space.cutoff
    p1, p2 = rho.mode_populations()
    diag = np.real(np.diag(rho.matrix)).reshape(N, N)
    total = np.bincount(rho.space.total_number(), weights=diag.ravel(), minlength=2 * N - 1)
    return {"n": np.arange(N), "mode1": p1, "mode2": p2, "total": total}
