"""Fixed-header CSV tables with round-trip float formatting."""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.17g"


def write_table(path: Path | str, columns: Mapping[str, np.ndarray]) -> Path:
    """Write equally long columns under a ``name1,name2,...`` header.

    Output bytes depend only on the values, so identical inputs give identical files.
    """
    path = Path(path)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float).ravel() for n in names])
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, data, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(names), comments="")
    return path


def read_table(path: Path | str) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names or ()}
