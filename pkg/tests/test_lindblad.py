from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.errors import CutoffTooSmall, InvalidParameters
from limitcycle_sync.core.lindblad import (
    build_liouvillian,
    charge_sector,
    number_distribution,
    phase_distribution_grid,
    phase_distribution_lme,
    steady_state,
)
from limitcycle_sync.models import SteadyStateMethod
from limitcycle_sync.models.lindblad import DensityMatrix, FockSpace
from limitcycle_sync.models.params import PairParams

CUTOFF = 14


def low_photon_pair(D: float = 0.2, delta: float = 0.0, omega_mean: float = 1.0) -> PairParams:
    return PairParams.from_photon_number(1.0, D=D, delta=delta, omega_mean=omega_mean)


@pytest.fixture(scope="module")
def rho() -> DensityMatrix:
    params = low_photon_pair()
    return steady_state(build_liouvillian(params, FockSpace(CUTOFF)))


def random_density(N: int, seed: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    d = N * N
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return DensityMatrix(matrix=m / np.trace(m).real, space=FockSpace(N))


def test_steady_state_is_a_state(rho):
    assert rho.trace == pytest.approx(1.0, abs=1e-12)
    assert rho.hermiticity_error < 1e-12
    assert rho.residual < 1e-9
    assert rho.min_eigenvalue > -1e-8
    assert rho.meta["boundary_population"] < 1e-4


def test_identity_is_left_null_vector():
    lv = build_liouvillian(low_photon_pair(delta=0.05), FockSpace(6))
    d = lv.space.hilbert_dim
    trace_row = np.eye(d).ravel()
    assert np.max(np.abs(trace_row @ lv.matrix)) < 1e-12


def test_sector_holds_the_diagonal():
    space = FockSpace(4)
    sector = set(charge_sector(space).tolist())
    d = space.hilbert_dim
    assert all(i * d + i in sector for i in range(d))
    # |1 0><0 0| changes the total number
    assert 4 * d + 0 not in sector


def test_dissipative_coupling_locks_in_antiphase(rho):
    dist = phase_distribution_lme(rho, 64)
    assert dist.total == pytest.approx(1.0, abs=1e-10)
    assert abs(abs(dist.mode) - np.pi) < 0.2
    assert dist.density.min() > -1e-10


@pytest.mark.parametrize("N,seed", [(2, 0), (3, 1), (5, 2), (6, 3)])
def test_fourier_series_matches_grid_integration(N, seed):
    state = random_density(N, seed)
    lme = phase_distribution_lme(state, 48)
    grid = phase_distribution_grid(state, 48)
    assert lme.linf_distance(grid) < 1e-8


def test_common_frequency_shift_leaves_numbers_unchanged():
    space = FockSpace(CUTOFF)
    a = steady_state(build_liouvillian(low_photon_pair(delta=0.1), space))
    b = steady_state(build_liouvillian(low_photon_pair(delta=0.1, omega_mean=7.0), space))
    np.testing.assert_allclose(number_distribution(a)["total"], number_distribution(b)["total"], atol=1e-10)


def test_detuning_sign_swaps_the_modes():
    space = FockSpace(CUTOFF)
    plus = number_distribution(steady_state(build_liouvillian(low_photon_pair(delta=0.3), space)))
    minus = number_distribution(steady_state(build_liouvillian(low_photon_pair(delta=-0.3), space)))
    np.testing.assert_allclose(plus["mode1"], minus["mode2"], atol=1e-10)


def test_number_distribution_sums_to_one(rho):
    numbers = number_distribution(rho)
    assert numbers["mode1"].sum() == pytest.approx(1.0)
    assert numbers["total"].sum() == pytest.approx(1.0)
    assert numbers["total"].size == 2 * CUTOFF - 1
    n1, n2 = rho.mean_photon_numbers()
    assert n1 == pytest.approx(n2, rel=1e-10)


def test_propagation_agrees_with_direct_solve(rho):
    lv = build_liouvillian(low_photon_pair(), FockSpace(CUTOFF))
    other = steady_state(lv, SteadyStateMethod.PROPAGATION, tol=1e-8)
    assert np.max(np.abs(other.matrix - rho.matrix)) < 1e-6


def test_cutoff_must_cover_the_photon_number():
    with pytest.raises(CutoffTooSmall):
        build_liouvillian(PairParams(gamma2=0.1), FockSpace(8))
    with pytest.raises(InvalidParameters):
        FockSpace(1)


def test_default_cutoff_scales_with_photon_number():
    assert FockSpace.default_for(PairParams(gamma2=0.1)).cutoff == 20
    assert FockSpace.default_for(PairParams(gamma2=0.05)).cutoff == 30
