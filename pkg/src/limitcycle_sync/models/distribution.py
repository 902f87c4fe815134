"""Phase-difference distributions on the periodic interval."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from limitcycle_sync.core.errors import InvalidParameters


def phase_grid(n_bins: int) -> np.ndarray:
    """Uniform nodes theta_j = -pi + j * 2pi / n_bins on [-pi, pi)."""
    return -np.pi + 2.0 * np.pi * np.arange(n_bins) / n_bins


@dataclass(eq=False)
class PhaseDistribution:
    grid: np.ndarray
    density: np.ndarray
    method: str
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.grid.shape != self.density.shape:
            raise InvalidParameters("grid and density must have the same shape", "PhaseDistribution")

    @property
    def n_bins(self) -> int:
        return int(self.grid.size)

    @property
    def bin_width(self) -> float:
        return 2.0 * np.pi / self.n_bins

    @property
    def total(self) -> float:
        return float(self.density.sum() * self.bin_width)

    @property
    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])

    def l1_distance(self, other: PhaseDistribution) -> float:
        self._check_grid(other)
        return float(np.abs(self.density - other.density).sum() * self.bin_width)

    def linf_distance(self, other: PhaseDistribution) -> float:
        self._check_grid(other)
        return float(np.max(np.abs(self.density - other.density)))

    def mirrored(self) -> PhaseDistribution:
        """Density of -theta on the same grid."""
        idx = (-np.arange(self.n_bins)) % self.n_bins
        return PhaseDistribution(self.grid.copy(), self.density[idx], f"{self.method}-mirror", dict(self.meta))

    def _check_grid(self, other: PhaseDistribution) -> None:
        if other.n_bins != self.n_bins:
            raise InvalidParameters(
                f"grids differ: {self.n_bins} vs {other.n_bins} bins", "PhaseDistribution",
            )
