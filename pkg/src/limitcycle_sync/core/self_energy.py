"""Self-energy evaluation and the Hubbard-Stratonovich noise matrix."""

from __future__ import annotations

import logging

import numpy as np

from limitcycle_sync.core.errors import InvalidModel, InvalidParameters, NotPSD
from limitcycle_sync.models.params import QuarticCouplings
from limitcycle_sync.models.self_energy import SelfEnergyModel

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-12


def _symmetric(diag: complex, off: complex) -> np.ndarray:
    return np.array([[diag, off], [off, diag]], dtype=complex)


def eval_self_energy(model: SelfEnergyModel, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """Return (Pi^R, Pi^K) as 2x2 complex matrices at omega.

    Raises InvalidModel when i * Pi^K is not positive semidefinite.
    """
    pir = _symmetric(*model.retarded(omega))
    pik = _symmetric(*model.keldysh(omega))
    spectrum = np.linalg.eigvalsh(0.5 * (1j * pik + (1j * pik).conj().T))
    scale = max(float(np.max(np.abs(spectrum))), 1.0)
    if spectrum.min() < -PSD_TOLERANCE * scale:
        raise InvalidModel(
            f"i*Pi^K not positive semidefinite at omega={omega} (min eigenvalue {spectrum.min():.3e})",
            "eval_self_energy",
        )
    return pir, pik


def self_energy_derivative(model: SelfEnergyModel, omega: float) -> np.ndarray:
    return _symmetric(*model.retarded_derivative(omega))


def cholesky_lower(c: np.ndarray, operation: str = "noise_matrix") -> np.ndarray:
    """Lower-triangular B with B B^dagger = C for a Hermitian PSD 2x2 matrix.

    Written out in closed form so that rank-deficient matrices (D = 0 limits,
    zero noise) factor without the strict positivity numpy.linalg.cholesky needs.
    """
    c = 0.5 * (c + c.conj().T)
    eig = np.linalg.eigvalsh(c)
    norm = float(np.max(np.abs(eig))) if eig.size else 0.0
    if eig.min() < -PSD_TOLERANCE * max(norm, 1e-300):
        raise NotPSD(f"noise matrix has eigenvalue {eig.min():.3e} (norm {norm:.3e})", operation)
    c11 = max(c[0, 0].real, 0.0)
    b11 = np.sqrt(c11)
    if b11 > 0:
        b21 = c[1, 0] / b11
    else:
        b21 = 0j
    b22 = np.sqrt(max(c[1, 1].real - abs(b21) ** 2, 0.0))
    return np.array([[b11, 0.0], [b21, b22]], dtype=complex)


def noise_matrix(
    model: SelfEnergyModel,
    nu: float,
    radii: tuple[float, float],
    couplings: QuarticCouplings,
    phases: tuple[float, float] = (0.0, 0.0),
    moduli: tuple[float, float] = (1.0, 1.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Return (C, B) for the rescaled complex noise of the pair.

    C_mn = exp(i(theta_m - theta_n)) i Pi^K_mn(nu) / (r_m r_n) + i lambda5 |phi_m|^2 delta_mn,
    with the phases frozen at the saddle and |phi_m| = 1 unless the
    multiplicative mode passes instantaneous moduli.
    """
    r1, r2 = radii
    if not (r1 > 0 and r2 > 0):
        raise InvalidParameters(f"radii must be positive, got {radii}", "noise_matrix")
    _, pik = eval_self_energy(model, nu)
    r = np.array([r1, r2])
    rot = np.exp(1j * np.asarray(phases, dtype=float))
    c = np.outer(rot, rot.conj()) * (1j * pik) / np.outer(r, r)
    c = c + np.diag(1j * couplings.lambda5 * np.asarray(moduli, dtype=float) ** 2)
    c = 0.5 * (c + c.conj().T)
    b = cholesky_lower(c)
    logger.debug("noise matrix at nu=%.6g: diag=(%.4g, %.4g)", nu, c[0, 0].real, c[1, 1].real)
    return c, b
