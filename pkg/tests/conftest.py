from __future__ import annotations

import pytest

from limitcycle_sync.config.settings import load_config
from limitcycle_sync.models.params import PairParams, QuarticCouplings


@pytest.fixture
def fig1_pair() -> PairParams:
    """gamma2/gamma1 = 0.1, D = 0.1 gamma1, on resonance."""
    return PairParams(omega1=1.0, omega2=1.0, gamma1=1.0, gamma2=0.1, D=0.1)


@pytest.fixture
def sl_couplings() -> QuarticCouplings:
    return QuarticCouplings.stuart_landau(0.1)


@pytest.fixture
def small_settings(tmp_path):
    """Resolved config shrunk to seconds-scale ensembles and cutoffs."""

    def build(**overrides):
        base = {
            "output.dir": str(tmp_path / "out"),
            "reproduce.n_traj": 16,
            "reproduce.T": 20.0,
            "reproduce.dt": 0.01,
            "reproduce.stride": 10,
            "reproduce.n_paths": 3,
            "reproduce.cutoff": 8,
            "reproduce.s2_cutoff": 8,
            "reproduce.nonmarkovian_T": 20.0,
            "reproduce.monte_carlo": False,
            "diffusion.n_boot": 20,
            "diffusion.photon_numbers": [5, 10],
            "diffusion.delta_over_D": [0.0, 0.5, 2.0],
            "fokker_planck.n_grid": 512,
            "fokker_planck.n_bins": 64,
            "scan.omega2_over_omega_ex": [0.96, 1.0],
            "scan.omega1_points": 3,
        }
        base.update(overrides)
        return load_config(None, base)

    return build
