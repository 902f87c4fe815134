from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.errors import InvalidParameters
from limitcycle_sync.core.reproduce import MemorySink, detuning_scan, frequency_grid, run_target

SCAN_HEADER = ["Delta_over_D", "sigma_minus_sq", "sigma0_sq", "ratio", "ci_low", "ci_high"]


def test_phase_distribution_target(small_settings):
    sink = MemorySink()
    summary = run_target("fig1", small_settings(), sink)
    table = sink.tables["fig1_phase_distribution.csv"]
    assert list(table) == ["theta", "continued_fraction", "finite_volume", "monte_carlo", "lindblad"]
    h = 2 * np.pi / table["theta"].size
    assert table["continued_fraction"].sum() * h == pytest.approx(1.0, abs=1e-10)
    assert summary["cf_vs_grid_linf"] < 1e-4
    assert np.all(np.isnan(table["monte_carlo"]))
    # cutoff 8 cannot hold five photons per mode
    assert np.all(np.isnan(table["lindblad"]))
    assert "plot_fig1.py" in sink.texts


def test_phase_distribution_target_with_ensemble(small_settings):
    sink = MemorySink()
    summary = run_target("fig1", small_settings(**{"reproduce.monte_carlo": True}), sink)
    mc = sink.tables["fig1_phase_distribution.csv"]["monte_carlo"]
    assert np.all(np.isfinite(mc))
    assert summary["cf_vs_monte_carlo_l1"] >= 0.0


def test_trajectory_target(small_settings):
    sink = MemorySink()
    summary = run_target("fig2", small_settings(), sink)
    traj = sink.tables["fig2_trajectories.csv"]
    assert list(traj) == ["t", "theta_minus_0", "theta_minus_1", "theta_minus_2"]
    assert traj["t"][-1] == pytest.approx(20.0)
    variance = sink.tables["fig2_variance.csv"]
    assert variance["theta_minus_var"][0] == 0.0
    assert summary["sigma_minus_sq_quadrature"] > 0
    assert summary["ci"][0] <= summary["sigma_minus_sq_fit"] <= summary["ci"][1]


def test_trajectory_target_is_reproducible(small_settings):
    a, b = MemorySink(), MemorySink()
    run_target("fig2", small_settings(), a)
    run_target("fig2", small_settings(**{"threads": 2}), b)
    np.testing.assert_array_equal(a.tables["fig2_variance.csv"]["theta_minus_var"],
                                  b.tables["fig2_variance.csv"]["theta_minus_var"])


def test_detuning_target(small_settings):
    sink = MemorySink()
    run_target("fig3", small_settings(), sink)
    for n in ("5", "10"):
        table = sink.tables[f"fig3_n{n}.csv"]
        assert list(table) == SCAN_HEADER
        assert np.all(np.isnan(table["ci_low"]))
        assert np.all(table["ratio"] > 0)
    inset = sink.tables["fig3_inset.csv"]
    assert inset["D"].size == 9
    assert np.all(np.diff(inset["sigma_minus_sq_n5"]) < 0)


def test_detuning_ratio_grows_with_detuning(small_settings):
    table = detuning_scan(small_settings(), 10.0)
    assert list(table) == SCAN_HEADER
    assert np.all(np.diff(table["ratio"]) > 0)


def test_self_energy_target(small_settings):
    sink = MemorySink()
    summary = run_target("fig4", small_settings(), sink)
    curves = sink.tables["fig4_self_energy.csv"]
    assert curves["omega"].size == 601
    nu = sink.tables["fig4_nu.csv"]
    assert nu["omega1"].size == 6
    assert summary["points"] == 6
    synced = nu["synchronized"] == 1.0
    assert np.all(np.isfinite(nu["nu"][synced]))
    assert np.all(np.isnan(nu["nu"][~synced]))


def test_frequency_grid_brackets_each_omega2(small_settings):
    grid = frequency_grid(small_settings())
    assert len(grid) == 6
    assert grid[0] == pytest.approx((0.96, 0.93))
    assert grid[-1] == pytest.approx((1.0, 1.03))


def test_unknown_target(small_settings):
    with pytest.raises(InvalidParameters):
        run_target("fig9", small_settings(), MemorySink())


def test_frequency_scan_target(small_settings):
    sink = MemorySink()
    summary = run_target("fig5", small_settings(), sink)
    table = sink.tables["fig5_ratio.csv"]
    assert summary["points"] == 6
    synced = np.isfinite(table["nu"])
    assert summary["synchronized"] == int(synced.sum()) > 0
    assert np.all(table["ratio_projected"][synced] > 0)
    assert np.all(np.isnan(table["ratio"]))
    assert "plot_fig5.py" in sink.texts


def test_frequency_scan_target_with_ensembles(small_settings):
    sink = MemorySink()
    run_target("fig5", small_settings(**{"reproduce.monte_carlo": True}), sink)
    table = sink.tables["fig5_ratio.csv"]
    synced = np.isfinite(table["nu"])
    assert np.all(np.isfinite(table["ratio"][synced]))
    assert np.all(np.isfinite(table["ci_low"][synced]))


def test_correlation_target(small_settings):
    gamma2 = 0.005
    sink = MemorySink()
    settings = small_settings(**{"self_energy.gamma2": gamma2, "reproduce.correlation_span": 0.25})
    summary = run_target("s1", settings, sink)
    corr = sink.tables["s1_correlation.csv"]
    assert corr["tau"][0] == 0.0
    assert corr["tau"][-1] == pytest.approx(50.0)
    assert corr["abs_c11"][0] == pytest.approx(np.max(corr["abs_c11"]))
    assert summary["inverse_gamma2"] == pytest.approx(200.0)
    assert np.isfinite(summary["tau_c"]) and summary["tau_c"] > 0
    # symmetric Lorentzian at resonance: 8 (1 + 2G/w)^2 / (N/Gamma + 2) with kappa_extra = 0.3
    assert summary["tau_c_linear"] * gamma2 == pytest.approx(8 * 1.4 ** 2 / (0.345 / 0.035 + 2), rel=1e-6)
    traj = sink.tables["s1_trajectory.csv"]
    assert list(traj) == ["t", "re_phi1", "im_phi1", "re_phi2", "im_phi2"]


def test_reduction_target(small_settings):
    sink = MemorySink()
    summary = run_target("s2", small_settings(), sink)
    assert set(summary) == {"n=5", "n=10"}
    diffusion = sink.tables["s2_diffusion.csv"]
    assert np.all(diffusion["sigma_minus_sq_adler"] > 0)
    assert np.all(diffusion["ci_low"] <= diffusion["ci_high"])
    for n in ("5", "10"):
        phase = sink.tables[f"s2_phase_n{n}.csv"]
        h = 2 * np.pi / phase["theta"].size
        assert phase["langevin"].sum() * h == pytest.approx(1.0)
        assert phase["continued_fraction"].sum() * h == pytest.approx(1.0, abs=1e-8)


@pytest.mark.slow
def test_correlation_time_tracks_two_photon_loss(small_settings):
    settings = small_settings(**{"reproduce.n_traj": 32})
    summary = run_target("s1", settings, MemorySink())
    inverse_gamma2 = summary["inverse_gamma2"]
    assert 0.5 * inverse_gamma2 < summary["tau_c"] < 2.0 * inverse_gamma2
    assert summary["tau_c"] == pytest.approx(summary["tau_c_linear"], rel=0.35)
