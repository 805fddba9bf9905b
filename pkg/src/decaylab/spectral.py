"""Spectral-density models D(eps).

Each model evaluates the nonnegative density on the real energy axis,
reports its support interval, and (for the analytic variants) continues
D into the complex energy plane.  Models are immutable after
construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchPointError, DomainError, UnsupportedContinuation

__all__ = [
    "SpectralModel",
    "Lorentzian",
    "Box",
    "AsymmetricBox",
    "ThresholdPower",
    "Tabulated",
    "model_from_config",
]


def _as_float_array(eps):
    arr = np.asarray(eps, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("density requires finite real energies")
    return arr


class SpectralModel:
    """Common interface of all spectral-density variants."""

    def density(self, eps):
        """D(eps) on the real axis; exactly zero outside the support."""
        raise NotImplementedError

    def density_complex(self, z: complex) -> complex:
        """Analytic continuation of D at complex z (principal branch)."""
        raise UnsupportedContinuation(
            f"{type(self).__name__} does not support complex continuation"
        )

    def support(self) -> tuple[float, float]:
        """Tight support interval, possibly unbounded."""
        raise NotImplementedError

    def total_weight(self) -> float:
        """Integral of D over its support."""
        raise NotImplementedError

    def char_width(self) -> float:
        """Characteristic energy width used for numerical scale choices."""
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where D is not smooth (quadrature hints)."""
        return ()


@dataclass(frozen=True)
class Lorentzian(SpectralModel):
    """D(eps) = A^2 / ((eps - center)^2 + width^2), supported on the whole line."""

    amplitude_sq: float
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("Lorentzian width must be positive")
        if self.amplitude_sq < 0:
            raise DomainError("amplitude_sq must be nonnegative")

    def density(self, eps):
        eps = _as_float_array(eps)
        out = self.amplitude_sq / ((eps - self.center) ** 2 + self.width**2)
        return out[()]

    def density_complex(self, z):
        z = complex(z)
        denom = (z - self.center) ** 2 + self.width**2
        if denom == 0:
            raise BranchPointError("Lorentzian continuation is singular at center ± i*width")
        return self.amplitude_sq / denom

    def support(self):
        return (-np.inf, np.inf)

    def total_weight(self):
        return np.pi * self.amplitude_sq / self.width

    def char_width(self):
        return self.width


@dataclass(frozen=True)
class Box(SpectralModel):
    """Flat density: A^2 for |eps| < half_width, zero outside."""

    amplitude_sq: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise DomainError("Box half_width must be positive")
        if self.amplitude_sq < 0:
            raise DomainError("amplitude_sq must be nonnegative")

    def density(self, eps):
        eps = _as_float_array(eps)
        out = np.where(np.abs(eps) < self.half_width, self.amplitude_sq, 0.0)
        return out[()]

    def density_complex(self, z):
        # The interior value continues as a constant through the strip
        # |Re z| <= half_width (off the real axis); the real edge points
        # are the branch points of the induced self-energy.
        z = complex(z)
        if z.imag == 0 and abs(z.real) >= self.half_width:
            raise BranchPointError("Box continuation undefined at/beyond the real band edges")
        if abs(z.real) > self.half_width:
            raise DomainError("Box continuation is defined on the strip |Re z| <= half_width")
        return complex(self.amplitude_sq)

    def support(self):
        return (-self.half_width, self.half_width)

    def total_weight(self):
        return 2.0 * self.half_width * self.amplitude_sq

    def char_width(self):
        return 2.0 * self.half_width

    def breakpoints(self):
        return (-self.half_width, self.half_width)


@dataclass(frozen=True)
class AsymmetricBox(SpectralModel):
    """Flat density A^2 on (lower, upper), zero outside."""

    amplitude_sq: float
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError("AsymmetricBox requires lower < upper")
        if self.amplitude_sq < 0:
            raise DomainError("amplitude_sq must be nonnegative")

    def density(self, eps):
        eps = _as_float_array(eps)
        out = np.where((eps > self.lower) & (eps < self.upper), self.amplitude_sq, 0.0)
        return out[()]

    def density_complex(self, z):
        z = complex(z)
        if z.imag == 0 and (z.real <= self.lower or z.real >= self.upper):
            raise BranchPointError("continuation undefined at/beyond the real band edges")
        if z.real < self.lower or z.real > self.upper:
            raise DomainError("continuation is defined on the strip lower <= Re z <= upper")
        return complex(self.amplitude_sq)

    def support(self):
        return (self.lower, self.upper)

    def total_weight(self):
        return (self.upper - self.lower) * self.amplitude_sq

    def char_width(self):
        return self.upper - self.lower

    def breakpoints(self):
        return (self.lower, self.upper)


@dataclass(frozen=True)
class ThresholdPower(SpectralModel):
    """D(eps) = beta * (eps - threshold)^exponent on [threshold, cutoff].

    The exponent must exceed -1 so the density is integrable at the
    threshold; the hard upper cutoff keeps the self-energy finite.
    """

    beta: float
    exponent: float
    threshold: float
    cutoff: float

    def __post_init__(self):
        if self.exponent <= -1:
            raise DomainError("exponent must be > -1 for an integrable threshold")
        if not self.cutoff > self.threshold:
            raise DomainError("cutoff must exceed threshold")
        if self.beta < 0:
            raise DomainError("beta must be nonnegative")

    def density(self, eps):
        eps = _as_float_array(eps)
        inside = (eps >= self.threshold) & (eps <= self.cutoff)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = self.beta * np.power(np.maximum(eps - self.threshold, 0.0), self.exponent)
        out = np.where(inside, vals, 0.0)
        return out[()]

    def density_complex(self, z):
        # Principal branch of (z - threshold)^exponent, cut along
        # (-inf, threshold) on the real axis.  The hard cutoff is not part
        # of the continued local form.
        z = complex(z)
        w = z - self.threshold
        if w == 0:
            if self.exponent >= 0 and self.exponent == int(self.exponent):
                return complex(self.beta * (0.0 if self.exponent > 0 else 1.0))
            raise BranchPointError("threshold is a branch point of the continuation")
        return self.beta * w**self.exponent

    def support(self):
        return (self.threshold, self.cutoff)

    def total_weight(self):
        span = self.cutoff - self.threshold
        return self.beta * span ** (self.exponent + 1.0) / (self.exponent + 1.0)

    def char_width(self):
        return self.cutoff - self.threshold

    def breakpoints(self):
        return (self.threshold, self.cutoff)


class Tabulated(SpectralModel):
    """Sampled density with linear interpolation, zero outside the samples."""

    def __init__(self, eps, values):
        eps = np.asarray(eps, dtype=float)
        vals = np.asarray(values, dtype=float)
        if eps.ndim != 1 or eps.shape != vals.shape or eps.size < 2:
            raise DomainError("Tabulated model needs matching 1-d eps/values arrays (>= 2 samples)")
        if np.any(np.diff(eps) <= 0):
            raise DomainError("Tabulated energies must be strictly increasing")
        if np.any(vals < 0):
            raise DomainError("Tabulated density values must be nonnegative")
        self._eps = eps
        self._vals = vals

    def __repr__(self):
        return f"Tabulated(n={self._eps.size}, span=({self._eps[0]}, {self._eps[-1]}))"

    def density(self, eps):
        eps = _as_float_array(eps)
        out = np.interp(eps, self._eps, self._vals)
        # np.interp clamps to the end values; force exact zero outside support
        out = np.where((eps < self._eps[0]) | (eps > self._eps[-1]), 0.0, out)
        return out[()]

    def support(self):
        return (float(self._eps[0]), float(self._eps[-1]))

    def total_weight(self):
        return float(np.trapezoid(self._vals, self._eps))

    def char_width(self):
        return float(self._eps[-1] - self._eps[0])

    def breakpoints(self):
        inner = self._eps[1:-1]
        return tuple(inner) if inner.size <= 64 else ()


def model_from_config(block: dict) -> SpectralModel:
    """Build a model from a config-file `model` block."""
    try:
        kind = str(block["type"]).lower()
    except KeyError:
        raise DomainError("model block is missing the 'type' key") from None
    try:
        if kind == "lorentzian":
            return Lorentzian(
                amplitude_sq=float(block["A2"]),
                center=float(block.get("a", 0.0)),
                width=float(block["b"]),
            )
        if kind == "box":
            return Box(amplitude_sq=float(block["A2"]), half_width=float(block["L"]))
        if kind == "asymmetricbox":
            return AsymmetricBox(
                amplitude_sq=float(block["A2"]),
                lower=float(block["L_minus"]),
                upper=float(block["L_plus"]),
            )
        if kind == "thresholdpower":
            return ThresholdPower(
                beta=float(block["beta_th"]),
                exponent=float(block["alpha"]),
                threshold=float(block["mu"]),
                cutoff=float(block["Lambda"]),
            )
        if kind == "tabulated":
            data = np.loadtxt(str(block["table_path"]), delimiter=",", skiprows=1, ndmin=2)
            return Tabulated(eps=data[:, 0], values=data[:, 1])
    except KeyError as exc:
        raise DomainError(f"model type '{kind}' is missing key {exc}") from None
    raise DomainError(f"unknown spectral model type '{kind}'")
