"""Saddle-point (mean-field limit cycle) results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from limitcycle_sync.models import Branch

ZERO_MODE_TOLERANCE = 1e-7
STABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SaddleSolution:
    nu: float
    r1: float
    r2: float
    theta0: float | None
    branch: Branch
    residual: float = 0.0
    stability: tuple[complex, ...] = ()
    # Bare (omega1, omega2); unsynchronized oscillators keep running at these.
    omegas: tuple[float, float] | None = None

    @property
    def radii(self) -> tuple[float, float]:
        return self.r1, self.r2

    @property
    def synchronized(self) -> bool:
        return self.branch == Branch.SYNCHRONIZED

    @property
    def stable(self) -> bool:
        """All modes but the slowest (global phase) decay or are marginal."""
        if not self.stability:
            return False
        ordered = sorted(self.stability, key=abs)
        return all(ev.real <= STABILITY_TOLERANCE for ev in ordered[1:])

    @property
    def zero_modes(self) -> int:
        return sum(1 for ev in self.stability if abs(ev) < ZERO_MODE_TOLERANCE)

    def to_dict(self) -> dict[str, Any]:
        return {
            "branch": self.branch.value,
            "nu": self.nu,
            "r1": self.r1,
            "r2": self.r2,
            "r_sq": self.r1 * self.r2,
            "theta0": self.theta0,
            "residual": self.residual,
            "stable": self.stable if self.stability else None,
            "stability": [[float(np.real(ev)), float(np.imag(ev))] for ev in self.stability],
            "omegas": list(self.omegas) if self.omegas else None,
        }


@dataclass(frozen=True)
class NoSync:
    """No stable synchronized root was found; not an error."""

    starts: int
    converged: int
    reason: str
    roots: tuple[SaddleSolution, ...] = field(default_factory=tuple)

    @property
    def synchronized(self) -> bool:
        return False

    def to_dict(self) -> dict[str, Any]:
        return {
            "branch": "no-sync",
            "starts": self.starts,
            "converged": self.converged,
            "reason": self.reason,
            "roots": [r.to_dict() for r in self.roots],
        }
