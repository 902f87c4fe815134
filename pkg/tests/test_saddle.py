from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.errors import NoLimitCycle
from limitcycle_sync.core.saddle import (
    _initial_radii,
    saddle_residuals,
    solve_pair_markovian,
    solve_pair_nonmarkovian,
    solve_single,
    stability_of_saddle,
    wrap_phase,
)
from limitcycle_sync.models import Branch
from limitcycle_sync.models.params import PairParams, QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.saddle import NoSync, SaddleSolution
from limitcycle_sync.models.self_energy import LorentzianGain, MarkovianPair


def test_single_oscillator_radius():
    nu, r = solve_single(SingleOscillatorParams(omega0=2.0, gamma1=1.0, gamma2=0.1),
                         QuarticCouplings.stuart_landau(0.1))
    assert nu == pytest.approx(2.0)
    assert r * r == pytest.approx(10.0)


def test_single_oscillator_needs_two_photon_loss():
    with pytest.raises(NoLimitCycle):
        solve_single(SingleOscillatorParams(), QuarticCouplings(lambda1=0.05j, lambda5=-2j))


def test_resonant_pair(fig1_pair):
    sol = solve_pair_markovian(fig1_pair)
    assert sol.synchronized
    assert sol.nu == pytest.approx(1.0)
    assert sol.r1 * sol.r2 == pytest.approx(10.0)
    assert sol.theta0 == pytest.approx(np.pi)
    assert sol.stable


@pytest.mark.parametrize("D", np.linspace(0.05, 0.9, 20))
def test_markovian_closed_form_grid(D):
    for x in np.linspace(-0.99, 0.99, 20):
        delta = x * D
        params = PairParams(omega1=1.0 + delta / 2, omega2=1.0 - delta / 2, gamma1=1.0, gamma2=0.1, D=D)
        sol = solve_pair_markovian(params)
        root = np.sqrt(1.0 - (params.delta / D) ** 2)
        assert sol.nu == pytest.approx(1.0, abs=1e-12)
        assert sol.r1 ** 2 == pytest.approx((1.0 - D + D * root) / 0.1, abs=1e-12 * 10)
        assert np.sin(sol.theta0) == pytest.approx(-params.delta / D, abs=1e-12)
        assert np.cos(sol.theta0) <= 0.0
        residual = saddle_residuals(MarkovianPair(1.0, D), sol.omegas, QuarticCouplings.stuart_landau(0.1),
                                    np.array([sol.nu, sol.theta0, sol.r1, sol.r2]))
        assert np.max(np.abs(residual)) < 1e-12


def test_outside_tongue_is_unsynchronized():
    params = PairParams(omega1=1.2, omega2=1.0, gamma1=1.0, gamma2=0.1, D=0.1)
    sol = solve_pair_markovian(params)
    assert sol.branch == Branch.UNSYNCHRONIZED
    assert sol.theta0 is None
    assert sol.r1 ** 2 == pytest.approx(9.0)


def test_no_limit_cycle_when_loss_exceeds_gain():
    with pytest.raises(NoLimitCycle):
        solve_pair_markovian(PairParams(omega1=2.5, omega2=0.5, gamma1=1.0, gamma2=0.1, D=1.5))


@pytest.mark.parametrize("D", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("x", [-0.6, 0.0, 0.8])
def test_generic_solver_agrees_with_closed_form(D, x):
    params = PairParams(omega1=1.0 + x * D / 2, omega2=1.0 - x * D / 2, gamma1=1.0, gamma2=0.1, D=D)
    exact = solve_pair_markovian(params)
    sol = solve_pair_nonmarkovian(MarkovianPair(1.0, D), params.omega1, params.omega2,
                                  QuarticCouplings.stuart_landau(0.1))
    assert isinstance(sol, SaddleSolution)
    assert sol.nu == pytest.approx(exact.nu, abs=1e-8)
    assert sol.r1 == pytest.approx(exact.r1, abs=1e-8)
    assert sol.r2 == pytest.approx(exact.r2, abs=1e-8)
    assert abs(wrap_phase(sol.theta0 - exact.theta0)) < 1e-8


def test_lorentzian_entrainment_pulls_toward_excitation():
    model = LorentzianGain()
    omega1, omega2 = 0.965, 0.96
    sol = solve_pair_nonmarkovian(model, omega1, omega2, QuarticCouplings.stuart_landau(5e-4))
    assert isinstance(sol, SaddleSolution)
    assert 0.5 * (omega1 + omega2) < sol.nu < model.omega_ex


def test_far_detuned_lorentzian_pair_does_not_lock():
    result = solve_pair_nonmarkovian(LorentzianGain(), 1.2, 0.8, QuarticCouplings.stuart_landau(5e-4))
    assert isinstance(result, NoSync)
    assert not result.synchronized
    assert result.starts > 0


def test_wrap_phase_range():
    for theta in (-7.0, -np.pi, 0.0, np.pi, 3 * np.pi, 10.0):
        wrapped = wrap_phase(theta)
        assert -np.pi < wrapped <= np.pi
        assert np.cos(wrapped) == pytest.approx(np.cos(theta))
    assert wrap_phase(np.pi + 1e-15) == np.pi


def test_locked_pair_has_one_neutral_mode(fig1_pair):
    sol = solve_pair_markovian(fig1_pair)
    eigs = np.array(stability_of_saddle(sol, MarkovianPair(1.0, 0.1), QuarticCouplings.stuart_landau(0.1)))
    assert np.allclose(eigs, [0.0, -0.1, -1.0, -1.1], atol=1e-9)
    assert np.count_nonzero(np.abs(eigs) < 1e-9) == 1
    assert np.allclose(np.array(sol.stability), eigs)


@pytest.mark.parametrize("omega", [0.96, 1.0, 1.04])
def test_identical_lorentzian_oscillators_lock_in_antiphase(omega):
    sol = solve_pair_nonmarkovian(LorentzianGain(), omega, omega, QuarticCouplings.stuart_landau(5e-4))
    assert isinstance(sol, SaddleSolution)
    assert sol.theta0 == pytest.approx(np.pi, abs=1e-9)
    assert sol.theta0 > 0
    assert sol.r1 == pytest.approx(sol.r2, rel=1e-9)
    assert sol.stable


def test_lorentzian_amplitude_balances_net_gain_at_resonance():
    model = LorentzianGain()
    sol = solve_pair_nonmarkovian(model, 1.0, 1.0, QuarticCouplings.stuart_landau(5e-4))
    net_gain = 4.0 * model.gain_strength - model.background_loss
    assert sol.nu == pytest.approx(1.0, abs=1e-9)
    assert sol.r1 ** 2 == pytest.approx(net_gain / 5e-4, rel=1e-8)


@pytest.mark.parametrize("x", [0.0, 0.5, 0.9])
def test_start_amplitude_is_exact_for_markovian_self_energy(x):
    params = PairParams(omega1=1.0 + 0.05 * x, omega2=1.0 - 0.05 * x, D=0.1)
    exact = solve_pair_markovian(params)
    r0 = _initial_radii(MarkovianPair(1.0, 0.1), QuarticCouplings.stuart_landau(0.1), 1.0, params.delta)
    assert r0 == pytest.approx(exact.r1, rel=1e-12)
