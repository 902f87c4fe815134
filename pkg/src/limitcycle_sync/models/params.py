"""Physical parameter sets."""

from __future__ import annotations

from dataclasses import dataclass

from limitcycle_sync.core.errors import InvalidParameters


@dataclass(frozen=True)
class SingleOscillatorParams:
    """Stuart-Landau oscillator: single-photon gain gamma1, two-photon loss gamma2."""

    omega0: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 0.1

    def __post_init__(self) -> None:
        if not self.gamma1 > 0:
            raise InvalidParameters(f"gamma1 must be > 0, got {self.gamma1}", "SingleOscillatorParams")
        if not self.gamma2 > 0:
            raise InvalidParameters(f"gamma2 must be > 0, got {self.gamma2}", "SingleOscillatorParams")

    @property
    def photon_number(self) -> float:
        return self.gamma1 / (2.0 * self.gamma2)


@dataclass(frozen=True)
class PairParams:
    """Two Stuart-Landau oscillators coupled through the loss channel sqrt(D)(a1 + a2)."""

    omega1: float = 1.0
    omega2: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 0.1
    D: float = 0.1

    def __post_init__(self) -> None:
        if not self.gamma1 > 0:
            raise InvalidParameters(f"gamma1 must be > 0, got {self.gamma1}", "PairParams")
        if not self.gamma2 > 0:
            raise InvalidParameters(f"gamma2 must be > 0, got {self.gamma2}", "PairParams")
        if not self.D >= 0:
            raise InvalidParameters(f"D must be >= 0, got {self.D}", "PairParams")

    @property
    def delta(self) -> float:
        return self.omega1 - self.omega2

    @property
    def photon_number(self) -> float:
        return self.gamma1 / (2.0 * self.gamma2)

    @classmethod
    def from_photon_number(
        cls, n: float, D: float, delta: float, gamma1: float = 1.0, omega_mean: float = 1.0,
    ) -> PairParams:
        """Build parameters at photon number n = gamma1 / (2 gamma2)."""
        return cls(
            omega1=omega_mean + delta / 2.0,
            omega2=omega_mean - delta / 2.0,
            gamma1=gamma1,
            gamma2=gamma1 / (2.0 * n),
            D=D,
        )


@dataclass(frozen=True)
class QuarticCouplings:
    """Time-local quartic couplings.

    ``lambda1`` stores the value entering the saddle-point and Langevin
    equations (the conjugate of the action's Lambda_1), so the Stuart-Landau
    oscillator has lambda1 = -i gamma2 / 2 and lambda5 = -2i gamma2.
    """

    lambda1: complex
    lambda5: complex

    @classmethod
    def stuart_landau(cls, gamma2: float) -> QuarticCouplings:
        if not gamma2 > 0:
            raise InvalidParameters(f"gamma2 must be > 0, got {gamma2}", "QuarticCouplings")
        return cls(lambda1=-0.5j * gamma2, lambda5=-2j * gamma2)

    @property
    def gamma2(self) -> float:
        """Two-photon loss rate implied by lambda1."""
        return -2.0 * self.lambda1.imag
