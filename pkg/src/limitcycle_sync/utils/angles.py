"""Angle wrapping helpers."""

from __future__ import annotations

import numpy as np


def wrap_angle(x: np.ndarray | float) -> np.ndarray:
    """Map angles into [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


def grid_index(x: np.ndarray, n_bins: int) -> np.ndarray:
    """Nearest node of the uniform grid theta_j = -pi + j * 2pi/n_bins (periodic)."""
    h = 2.0 * np.pi / n_bins
    return np.mod(np.floor((wrap_angle(x) + np.pi) / h + 0.5).astype(np.int64), n_bins)
