"""Band-limited bump mother wavelet, defined in the Fourier domain only."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_DELTA = 0.3
DEFAULT_QUAD_POINTS = 512


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def bump_hat(xi, delta: float = DEFAULT_DELTA):
    """Fourier transform of the bump wavelet.

    ``hat(xi) = exp(1 + 1 / (((xi - 1) / delta)**2 - 1))`` on the open interval
    ``(1 - delta, 1 + delta)`` and zero elsewhere, so that ``hat(1) == 1``.
    Accepts scalars or arrays; returns the same shape.
    """
    _check_delta(delta)
    xi_arr = np.asarray(xi, dtype=float)
    u = (xi_arr - 1.0) / delta
    inside = np.abs(u) < 1.0
    out = np.zeros_like(xi_arr)
    ui = u[inside]
    out[inside] = np.exp(1.0 + 1.0 / (ui * ui - 1.0))
    if np.ndim(xi) == 0:
        return float(out)
    return out


def r_psi_constant(delta: float = DEFAULT_DELTA, quadrature_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Integral of ``bump_hat(z) / z`` over the support, by Gauss-Legendre.

    The integrand is smooth and flat to all orders at the support edges, so
    Gauss-Legendre converges quickly; 512 nodes is far past convergence.
    """
    _check_delta(delta)
    if quadrature_points < 64:
        raise ValueError("quadrature_points must be >= 64")
    nodes, weights = np.polynomial.legendre.leggauss(quadrature_points)
    z = 1.0 + delta * nodes
    return float(delta * np.sum(weights * bump_hat(z, delta) / z))


@dataclass(frozen=True)
class MotherWavelet:
    """Bump wavelet with half-bandwidth ``delta`` and unit spectral peak."""

    delta: float = DEFAULT_DELTA
    normalization: float = 1.0

    def __post_init__(self):
        _check_delta(self.delta)
        if self.normalization != 1.0:
            raise ValueError("only the peak-1 bump normalization is supported")

    def hat(self, xi):
        return bump_hat(xi, self.delta)

    @cached_property
    def r_psi(self) -> float:
        return r_psi_constant(self.delta)

    @property
    def support(self) -> tuple[float, float]:
        return 1.0 - self.delta, 1.0 + self.delta

    def check_separation(self, d: float) -> None:
        """Raise unless ``delta < d / (1 + d)`` (multi-component separation)."""
        if not self.delta < d / (1.0 + d):
            raise ValueError(
                f"delta={self.delta} violates delta < d/(1+d) for separation d={d}"
            )
