from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.errors import InvalidParameters, NotConverged
from limitcycle_sync.core.fokker_planck import (
    boltzmann_density,
    liouvillian_branch,
    stationary_adler_cf,
    stationary_adler_grid,
)
from limitcycle_sync.core.saddle import solve_pair_markovian
from limitcycle_sync.models.params import PairParams


def test_uncoupled_distribution_is_uniform():
    cf = stationary_adler_cf(0.05, 0.0, 0.1, n_bins=128)
    grid = stationary_adler_grid(0.05, 0.0, 0.1, n_grid=256)
    assert np.allclose(cf.density, 1.0 / (2.0 * np.pi), atol=1e-12)
    assert np.allclose(grid.density, 1.0 / (2.0 * np.pi), atol=1e-10)


@pytest.mark.parametrize("sigma0_sq", [0.02, 0.05, 0.1, 0.2, 0.5])
def test_continued_fraction_matches_grid_oracle(sigma0_sq):
    D = 0.1
    for x in (0.0, 0.3, 0.7, 1.2, 3.0):
        cf = stationary_adler_cf(x * D, D, sigma0_sq, n_bins=2048)
        grid = stationary_adler_grid(x * D, D, sigma0_sq, n_grid=2048)
        assert cf.linf_distance(grid) < 1e-6
        assert cf.total == pytest.approx(1.0, abs=1e-10)
        assert grid.total == pytest.approx(1.0, abs=1e-10)
        assert cf.density.min() >= 0.0


def test_resonant_density_is_boltzmann():
    cf = stationary_adler_cf(0.0, 0.1, 0.04, n_bins=512)
    assert np.max(np.abs(cf.density - boltzmann_density(0.1, 0.04, cf.grid))) < 1e-8


def test_detuning_mirror_symmetry():
    plus = stationary_adler_grid(0.03, 0.1, 0.05, n_grid=512)
    minus = stationary_adler_grid(-0.03, 0.1, 0.05, n_grid=512)
    assert np.max(np.abs(minus.density - plus.mirrored().density)) < 1e-8


def test_weak_noise_peak_sits_at_locking_phase():
    params = PairParams(omega1=1.025, omega2=0.975, D=0.1)
    theta0 = solve_pair_markovian(params).theta0
    cf = stationary_adler_cf(params.delta, params.D, 0.005)
    assert abs(np.angle(np.exp(1j * (cf.mode - theta0)))) < 0.05


def test_too_few_harmonics_is_reported():
    with pytest.raises(NotConverged):
        stationary_adler_cf(0.0, 0.1, 1e-3, n_harmonics=8)


def test_parameter_checks():
    with pytest.raises(InvalidParameters):
        stationary_adler_cf(0.0, 0.1, 0.0)
    with pytest.raises(InvalidParameters):
        stationary_adler_cf(0.0, 0.1, 0.1, n_harmonics=4)
    with pytest.raises(InvalidParameters):
        stationary_adler_grid(0.0, 0.1, 0.1, n_grid=128)


def test_liouvillian_branch():
    assert liouvillian_branch(0.1, 0) == 0.0
    assert liouvillian_branch(0.1, 1) == pytest.approx(0.075)
    assert liouvillian_branch(0.1, -3) == liouvillian_branch(0.1, 3)
