"""Frequency-dependent photon self-energy providers.

Every provider returns the independent entries (Pi_11, Pi_12) of symmetric 2x2
matrices with Pi_11 = Pi_22 and Pi_12 = Pi_21; the matrices themselves are
assembled in ``core.self_energy``.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator, make_interp_spline

from limitcycle_sync.core.errors import InvalidModel, InvalidParameters, OutOfRange

TABULATED_COLUMNS: tuple[str, ...] = (
    "omega",
    "Re_PiR_11", "Im_PiR_11", "Re_PiR_12", "Im_PiR_12",
    "Re_PiK_11", "Im_PiK_11", "Re_PiK_12", "Im_PiK_12",
)

INTERPOLATIONS = ("pchip", "cubic", "linear")


class SelfEnergyModel(abc.ABC):
    """Provider of Pi^R(omega), Pi^K(omega) and d Pi^R / d omega."""

    kind: ClassVar[str] = ""

    @abc.abstractmethod
    def retarded(self, omega: float) -> tuple[complex, complex]:
        """Return (Pi^R_11, Pi^R_12) at omega."""

    @abc.abstractmethod
    def keldysh(self, omega: float) -> tuple[complex, complex]:
        """Return (Pi^K_11, Pi^K_12) at omega."""

    @abc.abstractmethod
    def retarded_derivative(self, omega: float) -> tuple[complex, complex]:
        """Return d/d omega of (Pi^R_11, Pi^R_12)."""

    @abc.abstractmethod
    def frequency_scale(self) -> float:
        """Characteristic frequency width used to size root-search windows."""

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class MarkovianPair(SelfEnergyModel):
    """Two Stuart-Landau oscillators with single-photon gain and collective loss."""

    kind: ClassVar[str] = "markovian"

    gamma1: float = 1.0
    D: float = 0.1

    def __post_init__(self) -> None:
        if not self.gamma1 > 0:
            raise InvalidParameters(f"gamma1 must be > 0, got {self.gamma1}", "MarkovianPair")
        if not self.D >= 0:
            raise InvalidParameters(f"D must be >= 0, got {self.D}", "MarkovianPair")

    def retarded(self, omega: float) -> tuple[complex, complex]:
        return -0.5j * (self.D - self.gamma1), -0.5j * self.D

    def keldysh(self, omega: float) -> tuple[complex, complex]:
        return -1j * (self.D + self.gamma1), -1j * self.D

    def retarded_derivative(self, omega: float) -> tuple[complex, complex]:
        return 0j, 0j

    def frequency_scale(self) -> float:
        return self.D if self.D > 0 else self.gamma1

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "gamma1": self.gamma1, "D": self.D}


@dataclass(frozen=True)
class LorentzianGain(SelfEnergyModel):
    """Lorentzian gain medium peaked at omega_ex.

    g(w) = G * width / (omega_ex - w - i width) has its pole in the lower half
    plane and Im g >= 0, maximal at omega_ex.  Pi^R_11 = -i b/2 + g and
    Pi^R_12 = -s g; the Keldysh part is that of a collective gain channel plus
    the background: i Pi^K = 2 Im g [[1, -s], [-s, 1]] + (b + kappa_extra) 1.
    """

    kind: ClassVar[str] = "lorentzian"

    omega_ex: float = 1.0
    width: float = 0.05
    gain_strength: float = 0.01
    background_loss: float = 0.005
    cross_sign: int = 1
    kappa_extra: float = 0.0

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise InvalidParameters(f"width must be > 0, got {self.width}", "LorentzianGain")
        if self.gain_strength < 0:
            raise InvalidParameters("gain_strength must be >= 0", "LorentzianGain")
        if self.background_loss < 0 or self.kappa_extra < 0:
            raise InvalidParameters("background_loss and kappa_extra must be >= 0", "LorentzianGain")
        if self.cross_sign not in (1, -1):
            raise InvalidParameters(f"cross_sign must be +1 or -1, got {self.cross_sign}", "LorentzianGain")

    def gain(self, omega: float) -> complex:
        return self.gain_strength * self.width / (self.omega_ex - omega - 1j * self.width)

    def retarded(self, omega: float) -> tuple[complex, complex]:
        g = self.gain(omega)
        return -0.5j * self.background_loss + g, -self.cross_sign * g

    def keldysh(self, omega: float) -> tuple[complex, complex]:
        peak = 2.0 * self.gain(omega).imag
        diag = peak + self.background_loss + self.kappa_extra
        return -1j * diag, 1j * self.cross_sign * peak

    def retarded_derivative(self, omega: float) -> tuple[complex, complex]:
        dg = self.gain_strength * self.width / (self.omega_ex - omega - 1j * self.width) ** 2
        return dg, -self.cross_sign * dg

    def frequency_scale(self) -> float:
        return self.width

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "omega_ex": self.omega_ex,
            "width": self.width,
            "gain_strength": self.gain_strength,
            "background_loss": self.background_loss,
            "cross_sign": self.cross_sign,
            "kappa_extra": self.kappa_extra,
        }


@dataclass(frozen=True, eq=False)
class Tabulated(SelfEnergyModel):
    """Self-energies sampled on a strictly increasing frequency grid."""

    kind: ClassVar[str] = "tabulated"

    omega: np.ndarray
    pir11: np.ndarray
    pir12: np.ndarray
    pik11: np.ndarray
    pik12: np.ndarray
    interpolation: str = "pchip"
    fd_step: float = 1e-6
    source: str = ""
    _interp: Any = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size < 4:
            raise InvalidModel("tabulated grid needs at least 4 frequencies", "Tabulated")
        if not np.all(np.diff(omega) > 0):
            raise InvalidModel("tabulated frequencies must be strictly increasing", "Tabulated")
        if self.interpolation not in INTERPOLATIONS:
            raise InvalidParameters(
                f"interpolation must be one of {INTERPOLATIONS}, got {self.interpolation!r}", "Tabulated",
            )
        samples = [np.asarray(a, dtype=complex) for a in (self.pir11, self.pir12, self.pik11, self.pik12)]
        if any(s.shape != omega.shape for s in samples):
            raise InvalidModel("sample arrays must match the frequency grid", "Tabulated")
        stacked = np.column_stack([part for s in samples for part in (s.real, s.imag)])
        if self.interpolation == "pchip":
            interp = PchipInterpolator(omega, stacked, axis=0, extrapolate=False)
        elif self.interpolation == "cubic":
            interp = CubicSpline(omega, stacked, axis=0, extrapolate=False)
        else:
            interp = make_interp_spline(omega, stacked, k=1, axis=0)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "pir11", samples[0])
        object.__setattr__(self, "pir12", samples[1])
        object.__setattr__(self, "pik11", samples[2])
        object.__setattr__(self, "pik12", samples[3])
        object.__setattr__(self, "_interp", interp)

    @classmethod
    def from_csv(cls, path: Path | str, interpolation: str = "pchip", fd_step: float = 1e-6) -> Tabulated:
        """Load a table with the ``omega,Re_PiR_11,...,Im_PiK_12`` header."""
        data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
        names = data.dtype.names or ()
        missing = [c for c in TABULATED_COLUMNS if c not in names]
        if missing:
            raise InvalidModel(f"{path}: missing columns {', '.join(missing)}", "Tabulated")
        col = {c: np.atleast_1d(data[c]) for c in TABULATED_COLUMNS}
        return cls(
            omega=col["omega"],
            pir11=col["Re_PiR_11"] + 1j * col["Im_PiR_11"],
            pir12=col["Re_PiR_12"] + 1j * col["Im_PiR_12"],
            pik11=col["Re_PiK_11"] + 1j * col["Im_PiK_11"],
            pik12=col["Re_PiK_12"] + 1j * col["Im_PiK_12"],
            interpolation=interpolation,
            fd_step=fd_step,
            source=str(path),
        )

    @classmethod
    def sample(
        cls, model: SelfEnergyModel, omega: np.ndarray, interpolation: str = "pchip", fd_step: float = 1e-6,
    ) -> Tabulated:
        """Tabulate another provider on the given grid."""
        omega = np.asarray(omega, dtype=float)
        ret = np.array([model.retarded(w) for w in omega])
        kel = np.array([model.keldysh(w) for w in omega])
        return cls(
            omega=omega,
            pir11=ret[:, 0], pir12=ret[:, 1],
            pik11=kel[:, 0], pik12=kel[:, 1],
            interpolation=interpolation,
            fd_step=fd_step,
            source=f"sampled:{model.kind}",
        )

    def _check_range(self, omega: float, margin: float = 0.0) -> None:
        if omega - margin < self.omega[0] or omega + margin > self.omega[-1]:
            raise OutOfRange(
                f"omega={omega} (margin {margin}) outside tabulated range "
                f"[{self.omega[0]}, {self.omega[-1]}]",
                "eval_self_energy",
            )

    def _values(self, omega: float) -> np.ndarray:
        self._check_range(omega)
        idx = int(np.searchsorted(self.omega, omega))
        if idx < self.omega.size and self.omega[idx] == omega:
            return np.array([self.pir11[idx], self.pir12[idx], self.pik11[idx], self.pik12[idx]])
        v = np.asarray(self._interp(omega), dtype=float).reshape(-1)
        return v[0::2] + 1j * v[1::2]

    def retarded(self, omega: float) -> tuple[complex, complex]:
        v = self._values(omega)
        return complex(v[0]), complex(v[1])

    def keldysh(self, omega: float) -> tuple[complex, complex]:
        v = self._values(omega)
        return complex(v[2]), complex(v[3])

    def retarded_derivative(self, omega: float) -> tuple[complex, complex]:
        h = self.fd_step
        try:
            self._check_range(omega, margin=h)
        except OutOfRange as exc:
            raise OutOfRange(str(exc), "self_energy_derivative") from exc
        up = self._values(omega + h)
        down = self._values(omega - h)
        d = (up[:2] - down[:2]) / (2.0 * h)
        return complex(d[0]), complex(d[1])

    def frequency_scale(self) -> float:
        return float(np.median(np.diff(self.omega))) * 10.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "source": self.source,
            "interpolation": self.interpolation,
            "fd_step": self.fd_step,
            "n_points": int(self.omega.size),
        }
