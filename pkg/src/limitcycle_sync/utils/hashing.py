"""Content hashes and per-trajectory seed derivation."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

BOOTSTRAP_STREAM = 2**32 - 1


def trajectory_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit seed for trajectory ``index`` of an ensemble.

    Depends only on (master_seed, index), never on worker layout.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def replicate_weights(master_seed: int, index: int, n_boot: int) -> np.ndarray:
    """Poisson(1) bootstrap weights of trajectory ``index`` in each of ``n_boot`` replicates.

    Drawn from a stream separate from the trajectory's noise.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(BOOTSTRAP_STREAM, int(index)))
    return np.random.default_rng(seq).poisson(1.0, n_boot).astype(float)


def sha256_file(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_digest(config: dict[str, Any]) -> str:
    """SHA-256 of a configuration mapping in canonical JSON form."""
    raw = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()
