"""Diffusion-constant results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from limitcycle_sync.models import NoiseConvention


@dataclass(frozen=True)
class QuadratureResult:
    """Effective diffusion (or drift) from the tilted-washboard double quadrature."""

    value: float
    rel_error: float
    n_nodes: int
    underflow: bool = False


@dataclass(frozen=True)
class DiffusionFit:
    """Slope/2 of a linear fit of Var(t), with a bootstrap interval over trajectories."""

    sigma_sq: float
    ci_low: float
    ci_high: float
    stderr: float
    r_squared: float
    n_points: int
    observable: str = "theta_minus"

    @property
    def rel_halfwidth(self) -> float:
        if self.sigma_sq == 0:
            return float("inf")
        return 0.5 * (self.ci_high - self.ci_low) / abs(self.sigma_sq)

    def to_dict(self) -> dict[str, Any]:
        return {
            "observable": self.observable,
            "sigma_sq": self.sigma_sq,
            "ci": [self.ci_low, self.ci_high],
            "stderr": self.stderr,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


@dataclass(frozen=True)
class DiffusionReport:
    sigma_minus_sq: float
    sigma_plus_sq: float
    sigma0_sq: float
    convention: NoiseConvention
    underflow: bool = False
    quadrature_error: float = 0.0
    fits: dict[str, DiffusionFit] = field(default_factory=dict)

    @property
    def ratio_minus_zero(self) -> float:
        return self.sigma_minus_sq / self.sigma0_sq if self.sigma0_sq > 0 else float("nan")

    @property
    def ratio_minus_plus(self) -> float:
        return self.sigma_minus_sq / self.sigma_plus_sq if self.sigma_plus_sq > 0 else float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "convention": self.convention.value,
            "sigma_minus_sq": self.sigma_minus_sq,
            "sigma_plus_sq": self.sigma_plus_sq,
            "sigma0_sq": self.sigma0_sq,
            "ratio_minus_zero": self.ratio_minus_zero,
            "ratio_minus_plus": self.ratio_minus_plus,
            "underflow": self.underflow,
            "quadrature_error": self.quadrature_error,
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
        }
