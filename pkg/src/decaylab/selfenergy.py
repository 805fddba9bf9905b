"""Self-energy of the discrete state.

The physical-sheet function is the Cauchy-type integral of the spectral
density over its support.  Crossing the real axis from above continues
it onto the second sheet by subtracting 2*pi*i times the analytically
continued density.  Closed forms are used for the Lorentzian and flat
band models; everything else goes through adaptive quadrature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureFailure
from .spectral import AsymmetricBox, Box, Lorentzian, SpectralModel

__all__ = ["SelfEnergy", "Renormalization"]


@dataclass(frozen=True)
class Renormalization:
    """Dressed bound state parameters for a level below the threshold."""

    Z: float
    omega_tilde: float


def _flat_band_log(omega: complex, lower: float, upper: float) -> complex:
    """Principal-branch log((omega - lower)/(omega - upper)).

    Off the real axis this equals the Cauchy integral of a unit flat
    density on (lower, upper); it vanishes for |omega| -> infinity and
    has imaginary part -pi on the upper lip of the band.
    """
    if omega.imag == 0 and lower <= omega.real <= upper:
        raise DomainError("flat-band closed form is singular on the real band")
    return np.log((omega - lower) / (omega - upper))


class SelfEnergy:
    """Evaluator of the level shift-and-width function of a spectral model.

    Immutable after construction; all evaluations are pure.
    """

    def __init__(self, model: SpectralModel, quad_tol: float = 1e-10,
                 max_subdiv: int = 10_000, eta: float | None = None):
        self.model = model
        self.quad_tol = float(quad_tol)
        self.max_subdiv = int(max_subdiv)
        self.eta = float(eta) if eta is not None else 1e-9 * model.char_width()
        if self.quad_tol <= 0 or self.max_subdiv < 10 or self.eta <= 0:
            raise DomainError("invalid quadrature settings")

    # -- basic quadrature plumbing -------------------------------------

    def _quad(self, f, a, b, points=None):
        kwargs = dict(epsabs=self.quad_tol, epsrel=1e-9,
                      limit=self.max_subdiv, complex_func=True)
        if points is not None and np.isfinite(a) and np.isfinite(b):
            pts = [p for p in points if a < p < b]
            if pts:
                kwargs["points"] = pts
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, a, b, **kwargs)
        if not np.isfinite(val):
            raise QuadratureFailure(f"integral over ({a}, {b}) is not finite")
        if abs(err) > max(1e4 * self.quad_tol, 1e-7 * max(1.0, abs(val))):
            raise QuadratureFailure(
                f"estimated quadrature error {abs(err):.3e} exceeds tolerance")
        return complex(val)

    def weight(self) -> float:
        """Total integrated density."""
        return self.model.total_weight()

    # -- physical sheet ------------------------------------------------

    def sigma_physical(self, omega: complex) -> complex:
        """Cauchy integral of the density at Im omega != 0 (either sign)."""
        omega = complex(omega)
        if omega.imag == 0:
            raise DomainError("sigma_physical requires Im omega != 0; "
                              "use sigma_upper for boundary values")
        m = self.model
        if isinstance(m, Lorentzian):
            sgn = 1.0 if omega.imag > 0 else -1.0
            return (np.pi * m.amplitude_sq / m.width) / (omega - m.center + sgn * 1j * m.width)
        if isinstance(m, (Box, AsymmetricBox)):
            lo, hi = m.support()
            return m.amplitude_sq * _flat_band_log(omega, lo, hi)
        return self._sigma_quadrature(omega)

    def _sigma_quadrature(self, omega: complex) -> complex:
        lo, hi = self.model.support()
        dens = self.model.density
        points = list(self.model.breakpoints())
        if lo < omega.real < hi:
            points.append(omega.real)
            if abs(omega.imag) < 0.01 * self.model.char_width() and np.isfinite(lo) \
                    and np.isfinite(hi):
                # Near the axis the pole sits inside the support and its
                # spike can slip between quadrature nodes.  Subtract the
                # flat density D(Re omega), whose integral is the exact
                # band logarithm, and integrate the bounded remainder.
                d0 = float(dens(omega.real))
                rest = self._quad(lambda e: (dens(e) - d0) / (omega - e), lo, hi,
                                  points=points)
                return rest + d0 * np.log((omega - lo) / (omega - hi))
        return self._quad(lambda e: dens(e) / (omega - e), lo, hi, points=points)

    def sigma_panel_rule(self, omega: complex) -> complex:
        """Physical-sheet value from the fixed panel rule (fast, ~1e-6 abs).

        Closed forms are used when available; otherwise the cached
        Gauss-Legendre panels.  Intended for integrands that need the
        self-energy many times at low accuracy, e.g. the denominators of
        the branch-cut integral.
        """
        omega = complex(omega)
        m = self.model
        if isinstance(m, (Lorentzian, Box, AsymmetricBox)):
            return self.sigma_physical(omega)
        nodes, weights = self._fixed_rule()
        return complex(np.sum(weights / (omega - nodes)))

    def _boundary_from_above(self, w: float) -> complex:
        """Limit of the integral for omega -> w + i0, w real."""
        m = self.model
        if isinstance(m, Lorentzian):
            return (np.pi * m.amplitude_sq / m.width) / (w - m.center + 1j * m.width)
        lo, hi = m.support()
        if w <= lo or w >= hi:
            if w == lo or w == hi:
                # finite only if the density decays to zero at the edge
                inward = 1.0 if w == lo else -1.0
                wc = m.char_width()
                d_far = float(m.density(w + inward * 1e-6 * wc))
                d_near = float(m.density(w + inward * 1e-12 * wc))
                if d_near > 0.5 * d_far + 1e-300:
                    raise DomainError("boundary value diverges at a band edge")
            return self._quad(lambda e: m.density(e) / (w - e), lo, hi,
                              points=m.breakpoints())
        if isinstance(m, (Box, AsymmetricBox)):
            pv = m.amplitude_sq * np.log((w - lo) / (hi - w))
            return pv - 1j * np.pi * m.amplitude_sq
        return self._principal_value(w) - 1j * np.pi * float(m.density(w))

    def _principal_value(self, w: float) -> complex:
        """PV integral of D(e)/(w - e) with a symmetric window around w."""
        m = self.model
        lo, hi = m.support()
        delta = min(w - lo, hi - w, m.char_width())
        dens = m.density
        total = self._quad(lambda u: (dens(w - u) - dens(w + u)) / u, 0.0, delta)
        if lo < w - delta:
            total += self._quad(lambda e: dens(e) / (w - e), lo, w - delta,
                                points=m.breakpoints())
        if w + delta < hi:
            total += self._quad(lambda e: dens(e) / (w - e), w + delta, hi,
                                points=m.breakpoints())
        return total

    def sigma_upper(self, omega: complex, force_quadrature: bool = False) -> complex:
        """Self-energy on the physical sheet for Im omega >= 0.

        Real omega returns the boundary value from above, whose imaginary
        part is -pi * D(omega) inside the support.
        """
        omega = complex(omega)
        if omega.imag < 0:
            raise DomainError("sigma_upper requires Im omega >= 0")
        if force_quadrature:
            if omega.imag == 0:
                return self._principal_value(omega.real) \
                    - 1j * np.pi * float(self.model.density(omega.real))
            return self._sigma_quadrature(omega)
        if omega.imag == 0:
            return self._boundary_from_above(omega.real)
        return self.sigma_physical(omega)

    # -- second sheet ----------------------------------------------------

    def sigma_continued(self, omega: complex, force_quadrature: bool = False) -> complex:
        """Second-sheet self-energy, continuous across the support interior.

        For Im omega > 0 this coincides with the physical sheet; below the
        axis it subtracts 2*pi*i times the continued density.  Defined for
        every omega where the model's continuation exists, so root finders
        may cross the axis freely.
        """
        omega = complex(omega)
        if omega.imag > 0:
            return self.sigma_upper(omega, force_quadrature=force_quadrature)
        if omega.imag == 0:
            return self.sigma_upper(omega, force_quadrature=force_quadrature)
        m = self.model
        if isinstance(m, Lorentzian) and not force_quadrature:
            return (np.pi * m.amplitude_sq / m.width) / (omega - m.center + 1j * m.width)
        base = self._sigma_quadrature(omega) if force_quadrature else self.sigma_physical(omega)
        return base - 2j * np.pi * m.density_complex(omega)

    def cut_discontinuity(self, xi: float, verify: bool = False) -> complex:
        """Jump of the self-energy across the cut hung from the threshold.

        Returns -2*pi*i times the continued density evaluated a distance
        xi up the imaginary direction from the lower support edge.  With
        ``verify=True`` the jump is instead measured directly as the
        difference of the two one-sided evaluations at depth xi below the
        threshold (offset by eta on either side of the vertical line).
        """
        xi = float(xi)
        if xi < 0:
            raise DomainError("xi must be nonnegative")
        mu, _ = self.model.support()
        if not np.isfinite(mu):
            raise DomainError("cut discontinuity requires a finite lower support bound")
        if verify:
            if xi <= 0:
                raise DomainError("two-sided verification requires xi > 0")
            w = mu - 1j * xi
            right = self.sigma_continued(w + self.eta)
            left = self.sigma_physical(w - self.eta)
            return right - left
        z = mu + 1j * max(xi, 5e-324)
        val = -2j * np.pi * self.model.density_complex(z)
        if xi == 0 and abs(val) < 1e-150:
            return 0j  # vanishing density at the threshold
        return val

    # -- bound state below threshold ------------------------------------

    def renormalize_below_threshold(self, omega0: float) -> Renormalization:
        """Dressed weight and energy of a level lying below the threshold."""
        omega0 = float(omega0)
        lo, hi = self.model.support()
        if not np.isfinite(lo) or omega0 >= lo:
            raise DomainError("renormalization requires omega0 strictly below a finite threshold")
        dens = self.model.density
        pts = self.model.breakpoints()
        level_shift = self._quad(lambda e: dens(e) / (omega0 - e), lo, hi, points=pts).real
        curvature = self._quad(lambda e: dens(e) / (omega0 - e) ** 2, lo, hi, points=pts).real
        z = 1.0 / (1.0 + curvature)
        return Renormalization(Z=z, omega_tilde=omega0 + z * level_shift)

    # -- vectorized contour evaluation -----------------------------------

    def sigma_upper_grid(self, omegas: np.ndarray) -> np.ndarray:
        """Physical-sheet self-energy on an array of points off the real axis.

        Used by the Laplace-Fourier inversion, which needs the integrand
        on many contour nodes at once.  Closed forms where available,
        otherwise a fixed panel-refined Gauss-Legendre rule over the
        (finite) support.
        """
        omegas = np.asarray(omegas, dtype=complex)
        if np.any(omegas.imag == 0):
            raise DomainError("contour nodes must lie off the real axis")
        m = self.model
        if isinstance(m, Lorentzian):
            sgn = np.where(omegas.imag > 0, 1.0, -1.0)
            return (np.pi * m.amplitude_sq / m.width) / (omegas - m.center + sgn * 1j * m.width)
        if isinstance(m, (Box, AsymmetricBox)):
            lo, hi = m.support()
            return m.amplitude_sq * np.log((omegas - lo) / (omegas - hi))
        nodes, weights = self._fixed_rule()
        out = np.empty(omegas.shape, dtype=complex)
        flat = omegas.ravel()
        res = out.ravel()
        chunk = max(1, 2_000_000 // max(nodes.size, 1))
        for start in range(0, flat.size, chunk):
            sl = slice(start, start + chunk)
            res[sl] = (weights / (flat[sl, None] - nodes[None, :])).sum(axis=1)
        return out

    def _fixed_rule(self):
        """Panel-refined Gauss-Legendre nodes/weights, premultiplied by D."""
        cached = getattr(self, "_rule_cache", None)
        if cached is not None:
            return cached
        lo, hi = self.model.support()
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError("fixed quadrature rule requires finite support")
        frac = np.array([0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.15, 0.3, 0.5,
                         0.7, 0.85, 0.95, 0.99, 0.999, 0.9999, 0.99999, 1.0])
        edges = np.unique(np.concatenate([lo + frac * (hi - lo),
                                          np.asarray(self.model.breakpoints())]))
        edges = edges[(edges >= lo) & (edges <= hi)]
        x, w = np.polynomial.legendre.leggauss(64)
        nodes, weights = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            nodes.append(0.5 * (a + b) + half * x)
            weights.append(half * w)
        nodes = np.concatenate(nodes)
        weights = np.concatenate(weights) * self.model.density(nodes)
        self._rule_cache = (nodes, weights)
        return nodes, weights
