from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.diffusion import fit_diffusion, markovian_noise_levels, wrapped_histogram
from limitcycle_sync.core.errors import InsufficientLength, InvalidParameters, StepTooLarge
from limitcycle_sync.core.fokker_planck import stationary_adler_cf
from limitcycle_sync.core.reproduce import markovian_pair
from limitcycle_sync.core.saddle import solve_pair_markovian
from limitcycle_sync.core.sde import (
    autocorrelation,
    integrate_block,
    merge_moments,
    pair_coefficients,
    run_ensemble,
    simulate,
    simulate_adler,
    simulate_pair_nonmarkovian,
    simulate_single_sl,
)
from limitcycle_sync.models.params import PairParams, QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.self_energy import MarkovianPair
from limitcycle_sync.models.trajectory import SimulationSpec, SystemKind
from limitcycle_sync.utils.hashing import trajectory_seed


def adler(sigma0_sq=0.05, T=20.0, dt=0.01, stride=10, D=0.1, delta=0.0) -> SimulationSpec:
    return SimulationSpec(kind=SystemKind.ADLER, dt=dt, T=T, stride=stride, delta=delta, D=D,
                          sigma0_sq=sigma0_sq, theta_init=np.pi)


def test_noise_free_adler_relaxes_to_locking_point():
    traj = simulate_adler(0.0, 0.1, 0.0, 0.5 * np.pi, dt=0.01, T=300.0, seed=1, stride=100)
    assert traj.theta_minus[-1] == pytest.approx(np.pi, abs=1e-6)
    assert traj.times[-1] == pytest.approx(300.0)


def test_same_seed_same_path():
    a = simulate_adler(0.01, 0.1, 0.05, 0.0, dt=0.01, T=50.0, seed=42, stride=5)
    b = simulate_adler(0.01, 0.1, 0.05, 0.0, dt=0.01, T=50.0, seed=42, stride=5)
    c = simulate_adler(0.01, 0.1, 0.05, 0.0, dt=0.01, T=50.0, seed=43, stride=5)
    assert np.array_equal(a.thetas, b.thetas)
    assert not np.array_equal(a.thetas, c.thetas)


def test_path_does_not_depend_on_block_neighbours():
    spec = adler(T=60.0)
    alone = simulate(spec, 11)
    block = integrate_block(spec, [7, 11, 13])
    assert np.array_equal(block.thetas[1], alone.thetas)


def test_ensemble_is_bit_identical_across_worker_counts():
    spec = adler()
    serial = run_ensemble(spec, 130, master_seed=5, threads=1, block_size=64)
    parallel = run_ensemble(spec, 130, master_seed=5, threads=3, block_size=64)
    for name in spec.observables:
        assert np.array_equal(serial.mean[name], parallel.mean[name])
        assert np.array_equal(serial.var[name], parallel.var[name])
        assert np.array_equal(serial.replicate_sum[name], parallel.replicate_sum[name])
        assert np.array_equal(serial.replicate_sq[name], parallel.replicate_sq[name])
    assert np.array_equal(serial.replicate_weight, parallel.replicate_weight)


def test_merge_moments_matches_direct_statistics():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(100, 7))
    blocks = [x[:30], x[30:64], x[64:]]
    counts = np.array([len(b) for b in blocks], dtype=float)
    means = np.stack([b.mean(axis=0) for b in blocks])
    m2s = np.stack([((b - b.mean(axis=0)) ** 2).sum(axis=0) for b in blocks])
    total, mean, m2 = merge_moments(counts, means, m2s)
    assert total == 100
    assert np.allclose(mean, x.mean(axis=0))
    assert np.allclose(m2 / (total - 1), x.var(axis=0, ddof=1))


def test_step_guard():
    with pytest.raises(StepTooLarge):
        simulate_adler(0.0, 0.1, 0.05, 0.0, dt=0.2, T=10.0, seed=0)
    with pytest.raises(StepTooLarge):
        simulate_single_sl(SingleOscillatorParams(), dt=0.1, T=10.0, seed=0)


def test_spec_validation():
    with pytest.raises(InvalidParameters):
        SimulationSpec(kind=SystemKind.ADLER, dt=0.0, T=1.0)
    with pytest.raises(InvalidParameters):
        SimulationSpec(kind=SystemKind.PAIR, dt=0.01, T=1.0)
    with pytest.raises(InvalidParameters):
        run_ensemble(adler(), 0, master_seed=0)


def test_pair_needs_synchronized_saddle():
    params = PairParams(omega1=1.5, omega2=1.0, D=0.1)
    sol = solve_pair_markovian(params)
    with pytest.raises(InvalidParameters):
        pair_coefficients(MarkovianPair(1.0, 0.1), sol, QuarticCouplings.stuart_landau(0.1), 0.01)


def test_noise_free_pair_stays_on_the_saddle(fig1_pair):
    sol = solve_pair_markovian(fig1_pair)
    traj = simulate_pair_nonmarkovian(
        MarkovianPair(1.0, 0.1), sol, QuarticCouplings.stuart_landau(0.1),
        dt=0.01, T=100.0, seed=3, stride=100, noise_scale=0.0, perturbation=(0.05 + 0.02j, -0.03j),
    )
    assert abs(traj.eta1[-1]) < 1e-4
    assert abs(traj.eta2[-1]) < 1e-4
    assert np.cos(traj.theta_minus[-1]) == pytest.approx(-1.0, abs=1e-6)


def test_brownian_ensemble_recovers_intensity():
    s = 0.05
    spec = adler(sigma0_sq=s, D=0.0, T=50.0)
    stats = run_ensemble(spec, 1024, master_seed=9, block_size=64, n_boot=100)
    fit = fit_diffusion(stats)
    assert fit.sigma_sq == pytest.approx(s, rel=0.15)
    assert fit.ci_low < fit.sigma_sq < fit.ci_high
    assert fit.r_squared > 0.9


def test_zero_noise_ensemble_has_no_diffusion():
    stats = run_ensemble(adler(sigma0_sq=0.0), 128, master_seed=2, n_boot=10)
    fit = fit_diffusion(stats)
    assert abs(fit.sigma_sq) < 1e-12


def test_wrapped_histogram_of_constant_path():
    samples = np.full((1, 500), np.pi)
    dist = wrapped_histogram(samples, n_bins=32, burn_in_fraction=0.0)
    assert np.count_nonzero(dist.density) == 1
    assert dist.total == pytest.approx(1.0)


def test_autocorrelation_of_constant_field():
    paths = np.ones((4, 2, 400), dtype=complex)
    table = autocorrelation(paths, tau_max=1.0, sample_dt=0.1)
    assert table.values.shape == (11, 2, 2)
    assert np.allclose(table.values, 1.0)
    with pytest.raises(InsufficientLength):
        autocorrelation(paths, tau_max=20.0, sample_dt=0.1)


def test_trajectory_seeds_are_stable():
    assert trajectory_seed(0, 1) == trajectory_seed(0, 1)
    assert trajectory_seed(0, 1) != trajectory_seed(0, 2)
    assert trajectory_seed(0, 1) != trajectory_seed(1, 1)


@pytest.mark.slow
def test_single_oscillator_statistics():
    params = SingleOscillatorParams(gamma1=1.0, gamma2=0.1)
    spec = SimulationSpec(kind=SystemKind.SINGLE, dt=1e-3, T=200.0, stride=100, single=params)
    stats = run_ensemble(spec, 2000, master_seed=0)
    late = stats.times > 20.0
    assert np.mean(stats.var["eta"][late]) == pytest.approx(0.075, rel=0.05)
    fit = fit_diffusion(stats, observable="theta")
    assert fit.sigma_sq == pytest.approx(0.075, rel=0.05)


def test_replicates_are_streamed_not_stored():
    stats = run_ensemble(adler(), 40, master_seed=1, n_boot=25)
    assert stats.paths is None
    assert stats.n_boot == 25
    assert stats.replicate_sum["theta_minus"].shape == (25, stats.times.size)
    # Poisson(1) weights: each replicate counts about n_traj trajectories
    assert 20 < stats.replicate_weight.mean() < 60
    kept = run_ensemble(adler(), 40, master_seed=1, n_boot=25, keep_paths=True)
    assert kept.paths["theta_minus"].shape == (40, stats.times.size)
    assert np.array_equal(kept.replicate_sum["theta_minus"], stats.replicate_sum["theta_minus"])
    with pytest.raises(InvalidParameters):
        run_ensemble(adler(), 8, master_seed=1, n_boot=-1)


def test_replicates_do_not_depend_on_block_size():
    small = run_ensemble(adler(), 100, master_seed=3, block_size=16, n_boot=30)
    large = run_ensemble(adler(), 100, master_seed=3, block_size=64, n_boot=30)
    assert np.array_equal(small.replicate_weight, large.replicate_weight)
    assert np.allclose(small.replicate_sum["theta_minus"], large.replicate_sum["theta_minus"], rtol=1e-12)


@pytest.mark.slow
def test_pair_phase_difference_reduces_to_adler_at_large_photon_number():
    params = markovian_pair(100, 0.1, 0.5)
    sol = solve_pair_markovian(params)
    spec = SimulationSpec(
        kind=SystemKind.PAIR, dt=0.02, T=600.0, stride=10, model=MarkovianPair(params.gamma1, params.D),
        saddle=sol, couplings=QuarticCouplings.stuart_landau(params.gamma2),
    )
    stats = run_ensemble(spec, 512, master_seed=4, keep_paths=True)
    mc = wrapped_histogram(stats.paths["theta_minus"], n_bins=64)
    _, s = markovian_noise_levels(params)
    cf = stationary_adler_cf(params.delta, params.D, s, n_bins=64)
    assert cf.l1_distance(mc) < 0.03
