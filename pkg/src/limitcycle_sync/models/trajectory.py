"""Sample paths, integration settings and ensemble statistics."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from limitcycle_sync.core.errors import InvalidParameters
from limitcycle_sync.models.params import QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.saddle import SaddleSolution
from limitcycle_sync.models.self_energy import SelfEnergyModel


class SystemKind(enum.Enum):
    ADLER = "adler"
    SINGLE = "single"
    PAIR = "pair"

    @classmethod
    def from_str(cls, s: str) -> SystemKind:
        for member in cls:
            if member.value == s:
                return member
        raise ValueError(f"unknown system {s!r}")


OBSERVABLES: dict[SystemKind, tuple[str, ...]] = {
    SystemKind.ADLER: ("theta_minus",),
    SystemKind.SINGLE: ("theta", "eta"),
    SystemKind.PAIR: ("theta_plus", "theta_minus", "eta1", "eta2"),
}


@dataclass(eq=False)
class Trajectory:
    """One seeded path.  ``thetas`` and ``etas`` have shape (n_oscillators, n_samples).

    Phases are unwrapped; the Adler system stores the phase difference as its
    single phase and carries no radial field.
    """

    kind: SystemKind
    dt: float
    times: np.ndarray
    thetas: np.ndarray
    etas: np.ndarray | None = None
    seed: int = 0
    phi: np.ndarray | None = None

    @property
    def theta(self) -> np.ndarray:
        return self.thetas[0]

    @property
    def theta1(self) -> np.ndarray:
        return self.thetas[0]

    @property
    def theta2(self) -> np.ndarray:
        return self.thetas[1]

    @property
    def eta(self) -> np.ndarray:
        if self.etas is None:
            raise AttributeError("trajectory carries no radial fluctuations")
        return self.etas[0]

    @property
    def eta1(self) -> np.ndarray:
        return self.eta

    @property
    def eta2(self) -> np.ndarray:
        if self.etas is None or self.etas.shape[0] < 2:
            raise AttributeError("trajectory carries no second radial field")
        return self.etas[1]

    @property
    def theta_minus(self) -> np.ndarray:
        if self.kind == SystemKind.ADLER:
            return self.thetas[0]
        return self.thetas[0] - self.thetas[1]

    @property
    def theta_plus(self) -> np.ndarray:
        return self.thetas[0] + self.thetas[1]

    def observable(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name))


@dataclass
class SimulationSpec:
    """Everything needed to integrate one system, shared by all trajectories."""

    kind: SystemKind
    dt: float
    T: float
    stride: int = 1
    # adler
    delta: float = 0.0
    D: float = 0.0
    sigma0_sq: float = 0.0
    theta_init: float = 0.0
    # single Stuart-Landau
    single: SingleOscillatorParams | None = None
    eta_init: float = 0.0
    noise_scale: float = 1.0
    # non-Markovian pair
    model: SelfEnergyModel | None = None
    saddle: SaddleSolution | None = None
    couplings: QuarticCouplings | None = None
    multiplicative: bool = False
    perturbation: tuple[complex, complex] = (0j, 0j)
    keep_field: bool = False

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise InvalidParameters(f"dt must be > 0, got {self.dt}", "SimulationSpec")
        if not self.T > 0:
            raise InvalidParameters(f"T must be > 0, got {self.T}", "SimulationSpec")
        if self.stride < 1:
            raise InvalidParameters(f"stride must be >= 1, got {self.stride}", "SimulationSpec")
        if self.kind == SystemKind.SINGLE and self.single is None:
            raise InvalidParameters("single-oscillator spec needs parameters", "SimulationSpec")
        if self.kind == SystemKind.PAIR and (self.model is None or self.saddle is None or self.couplings is None):
            raise InvalidParameters("pair spec needs model, saddle and couplings", "SimulationSpec")

    @property
    def n_steps(self) -> int:
        return int(np.floor(self.T / self.dt + 1e-9))

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.stride + 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * (self.stride * self.dt)

    @property
    def observables(self) -> tuple[str, ...]:
        return OBSERVABLES[self.kind]

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value, "dt": self.dt, "T": self.T, "stride": self.stride}
        if self.kind == SystemKind.ADLER:
            data.update(delta=self.delta, D=self.D, sigma0_sq=self.sigma0_sq, theta_init=self.theta_init)
        elif self.kind == SystemKind.SINGLE and self.single is not None:
            data.update(
                omega0=self.single.omega0, gamma1=self.single.gamma1, gamma2=self.single.gamma2,
                eta_init=self.eta_init, noise_scale=self.noise_scale,
            )
        elif self.model is not None and self.saddle is not None:
            data.update(model=self.model.to_dict(), saddle=self.saddle.to_dict(), multiplicative=self.multiplicative)
        return data


@dataclass(eq=False)
class EnsembleStats:
    """Time-resolved mean and variance of each observable over an ensemble.

    Replicate b of the Poisson bootstrap counts trajectory i w_bi times;
    ``replicate_weight`` holds sum_i w_bi and ``replicate_sum`` /
    ``replicate_sq`` hold sum_i w_bi x_i(t) and sum_i w_bi x_i(t)^2, each
    (n_boot, n_samples).  Paths and the complex pair field are only kept
    on request.
    """

    times: np.ndarray
    mean: dict[str, np.ndarray]
    var: dict[str, np.ndarray]
    n_traj: int
    master_seed: int
    dt: float
    replicate_weight: np.ndarray = field(default_factory=lambda: np.zeros(0))
    replicate_sum: dict[str, np.ndarray] = field(default_factory=dict)
    replicate_sq: dict[str, np.ndarray] = field(default_factory=dict)
    paths: dict[str, np.ndarray] | None = None
    phi: np.ndarray | None = None

    @property
    def n_boot(self) -> int:
        return int(self.replicate_weight.size)

    @property
    def observables(self) -> tuple[str, ...]:
        return tuple(self.mean)

    def std_error(self, name: str) -> np.ndarray:
        return np.sqrt(self.var[name] / max(self.n_traj, 1))


@dataclass(eq=False)
class CorrelationTable:
    """C_mn(tau) = < conj(phi_m(t)) phi_n(t + tau) >, shape (n_tau, 2, 2)."""

    taus: np.ndarray
    values: np.ndarray
    n_traj: int = 1

    def component(self, m: int, n: int) -> np.ndarray:
        return self.values[:, m, n]
