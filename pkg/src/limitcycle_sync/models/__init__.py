"""Data models for limitcycle-sync."""

from __future__ import annotations

import enum


class Branch(enum.Enum):
    SYNCHRONIZED = "synchronized"
    UNSYNCHRONIZED = "unsynchronized"


class NoiseConvention(enum.Enum):
    """Which noise level normalizes the phase-difference diffusion."""

    NOISE_MATRIX = "noise-matrix"
    TEXT = "text"

    @classmethod
    def from_str(cls, s: str) -> NoiseConvention:
        for member in cls:
            if member.value == s:
                return member
        raise ValueError(f"unknown noise convention {s!r}")


class SteadyStateMethod(enum.Enum):
    NULL_SPACE = "nullspace"
    PROPAGATION = "propagation"

    @classmethod
    def from_str(cls, s: str) -> SteadyStateMethod:
        for member in cls:
            if member.value == s:
                return member
        raise ValueError(f"unknown steady-state method {s!r}")
