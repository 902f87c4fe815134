"""Fock-space types for the two-mode master-equation oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import sparse

from limitcycle_sync.core.errors import InvalidParameters
from limitcycle_sync.models.params import PairParams

MAX_DEFAULT_CUTOFF = 30
MIN_DEFAULT_CUTOFF = 20


@dataclass(frozen=True)
class FockSpace:
    """Two bosonic modes truncated to states 0..cutoff-1 each."""

    cutoff: int

    def __post_init__(self) -> None:
        if self.cutoff < 2:
            raise InvalidParameters(f"cutoff must be >= 2, got {self.cutoff}", "FockSpace")

    @property
    def modes(self) -> int:
        return 2

    @property
    def hilbert_dim(self) -> int:
        return self.cutoff ** 2

    @property
    def liouville_dim(self) -> int:
        return self.cutoff ** 4

    def total_number(self) -> np.ndarray:
        """n1 + n2 of each basis state |n1, n2> (index n1 * cutoff + n2)."""
        n = np.arange(self.cutoff)
        return (n[:, None] + n[None, :]).ravel()

    @classmethod
    def default_for(cls, params: PairParams) -> FockSpace:
        n = params.photon_number
        return cls(cutoff=min(max(MIN_DEFAULT_CUTOFF, math.ceil(4.0 * n)), MAX_DEFAULT_CUTOFF))


@dataclass(eq=False)
class Liouvillian:
    """Row-major vectorized superoperator: vec(rho)[i * d + j] = rho[i, j]."""

    matrix: sparse.csr_matrix
    space: FockSpace
    params: PairParams

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.space.hilbert_dim
        return (self.matrix @ np.asarray(rho, dtype=complex).ravel()).reshape(d, d)


@dataclass(eq=False)
class DensityMatrix:
    matrix: np.ndarray
    space: FockSpace
    residual: float = 0.0
    method: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())

    def mean_photon_numbers(self) -> tuple[float, float]:
        n = np.arange(self.space.cutoff)
        p1, p2 = self.mode_populations()
        return float(n @ p1), float(n @ p2)

    def mode_populations(self) -> tuple[np.ndarray, np.ndarray]:
        """Marginal Fock populations of each mode."""
        N = self.space.cutoff
        diag = np.real(np.diag(self.matrix)).reshape(N, N)
        return diag.sum(axis=1), diag.sum(axis=0)
