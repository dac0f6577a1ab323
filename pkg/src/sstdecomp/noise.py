"""ARMA / GARCH error processes and the heteroscedastic noise scenarios.

Random numbers come from numpy's Philox counter-based bit generator seeded
with a 64-bit integer, so a ``(spec, n, seed)`` triple always reproduces the
same draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import signal as sps

from .synth import SampledSignal

BURN_IN = 1000
_UNIT_ROOT_TOL = 1e-8


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class ArmaSpec:
    """ARMA model ``a(B) X_t = b(B) w_t`` with ``a(z) = ar_poly[0] + ar_poly[1] z + ...``.

    ``innovation`` is ``"gaussian"`` (N(0, 1)) or ``"student_t"`` with ``df``
    degrees of freedom (unscaled, variance df/(df-2)).
    """

    ar_poly: tuple[float, ...] = (1.0,)
    ma_poly: tuple[float, ...] = (1.0,)
    innovation: str = "gaussian"
    df: float = 4.0
    burn_in: int = BURN_IN

    def __post_init__(self):
        ar = tuple(float(c) for c in self.ar_poly)
        ma = tuple(float(c) for c in self.ma_poly)
        if not ar or not ma or ar[0] != 1.0 or ma[0] != 1.0:
            raise ValueError("ar_poly and ma_poly must start with 1")
        if self.innovation not in ("gaussian", "student_t"):
            raise ValueError(f"unknown innovation {self.innovation!r}")
        object.__setattr__(self, "ar_poly", ar)
        object.__setattr__(self, "ma_poly", ma)

    @property
    def innovation_variance(self) -> float:
        if self.innovation == "gaussian":
            return 1.0
        return self.df / (self.df - 2.0) if self.df > 2 else np.inf

    def ar_roots(self) -> np.ndarray:
        if len(self.ar_poly) == 1:
            return np.array([])
        # np.roots wants the highest power first
        return np.roots(self.ar_poly[::-1])

    def check_stationary(self) -> None:
        roots = self.ar_roots()
        if roots.size and np.min(np.abs(roots)) <= 1.0 + _UNIT_ROOT_TOL:
            raise ValueError(
                f"AR polynomial {self.ar_poly} has a root on or inside the unit circle "
                f"(min |z| = {np.min(np.abs(roots)):.6g})"
            )


# X_t + 0.5 X_{t-1} = w_t + 0.4 w_{t-1}, and so on
ARMA1 = ArmaSpec((1.0, 0.5), (1.0, 0.4), "student_t", 4.0)
ARMA2 = ArmaSpec((1.0, -0.2), (1.0, 0.51), "student_t", 4.0)
ARMA3 = ArmaSpec((1.0, 0.5), (1.0, 0.4), "gaussian")
ARMA4 = ArmaSpec((1.0, -0.2), (1.0, 0.51), "gaussian")


@dataclass(frozen=True)
class GarchSpec:
    """``s2_t = omega0 + sum arch_j e_{t-j}^2 + sum garch_j s2_{t-j}``, ``e_t = s_t z_t``."""

    omega0: float = 1.0
    arch: tuple[float, ...] = ()
    garch: tuple[float, ...] = ()
    burn_in: int = BURN_IN

    def __post_init__(self):
        object.__setattr__(self, "arch", tuple(float(c) for c in self.arch))
        object.__setattr__(self, "garch", tuple(float(c) for c in self.garch))

    def check_stationary(self) -> None:
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if any(c < 0 for c in self.arch + self.garch):
            raise ValueError("GARCH coefficients must be non-negative")
        if sum(self.arch) + sum(self.garch) >= 1.0:
            raise ValueError("sum of ARCH and GARCH coefficients must be < 1")

    @property
    def unconditional_variance(self) -> float:
        return self.omega0 / (1.0 - sum(self.arch) - sum(self.garch))


# GARCH(1,2) read as omega0 = 1, one ARCH lag 0.2, GARCH lags (0.2, 0.3)
GARCH_X3 = GarchSpec(1.0, (0.2,), (0.2, 0.3))


def _innovations(spec: ArmaSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    if spec.innovation == "gaussian":
        return rng.standard_normal(size)
    return rng.standard_t(spec.df, size)


def simulate_arma(spec: ArmaSpec, n: int, seed) -> np.ndarray:
    """Draw ``n`` samples of the stationary ARMA process after ``burn_in``.

    Initial conditions are zero; the transient is discarded with the burn-in.
    """
    spec.check_stationary()
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    w = _innovations(spec, n + spec.burn_in, rng)
    x = sps.lfilter(spec.ma_poly, spec.ar_poly, w)
    return x[spec.burn_in:]


def arma_spectral_density(spec: ArmaSpec, xi, sigma2: float = 1.0):
    """``sigma2 |b(e^{-i xi})|^2 / (2 pi |a(e^{-i xi})|^2)`` for xi in radians/sample."""
    spec.check_stationary()
    xi = np.asarray(xi, dtype=float)
    z = np.exp(-1j * xi)
    b = np.polynomial.polynomial.polyval(z, spec.ma_poly)
    a = np.polynomial.polynomial.polyval(z, spec.ar_poly)
    out = sigma2 * np.abs(b) ** 2 / (2 * np.pi * np.abs(a) ** 2)
    return float(out) if out.ndim == 0 else out


def simulate_garch(spec: GarchSpec, n: int, seed) -> np.ndarray:
    spec.check_stationary()
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    total = n + spec.burn_in
    z = rng.standard_normal(total)
    arch, garch = spec.arch, spec.garch
    # start every lag at the unconditional variance
    e2_hist = [spec.unconditional_variance] * len(arch)
    s2_hist = [spec.unconditional_variance] * len(garch)
    eps = np.empty(total)
    for t in range(total):
        v = spec.omega0
        for c, e2 in zip(arch, e2_hist):
            v += c * e2
        for c, s2 in zip(garch, s2_hist):
            v += c * s2
        e = math.sqrt(v) * float(z[t])
        eps[t] = e
        if arch:
            e2_hist = [e * e] + e2_hist[:-1]
        if garch:
            s2_hist = [v] + s2_hist[:-1]
    return eps[spec.burn_in:]


def modulator(t):
    """Heteroscedastic scale ``1 + 0.1 cos(pi t)``."""
    return 1.0 + 0.1 * np.cos(np.pi * np.asarray(t, dtype=float))


NOISE_KINDS = ("X1", "X2", "X3", "X4", "X5")

# which raw processes each scenario needs, in draw order
_PARTS = {
    "X1": ("ARMA1",),
    "X2": ("ARMA1", "ARMA2"),
    "X3": ("GARCH",),
    "X4": ("ARMA3", "ARMA4"),
    "X5": ("ARMA1", "ARMA4"),
}
_SPECS = {"ARMA1": ARMA1, "ARMA2": ARMA2, "ARMA3": ARMA3, "ARMA4": ARMA4}


def compose_noise(kind: str, parts: Mapping[str, np.ndarray], tau: float) -> np.ndarray:
    """Combine raw process draws into scenario noise ``kind``.

    ``parts`` maps process names (``ARMA1``..``ARMA4``, ``GARCH``) to arrays
    of equal length n; sample l (zero-based) sits at time ``(l + 1) * tau``.
    """
    if kind not in _PARTS:
        raise ValueError(f"unknown noise kind {kind!r}")
    first = np.asarray(parts[_PARTS[kind][0]], dtype=float)
    n = first.size
    sigma = modulator(tau * np.arange(1, n + 1))
    if kind == "X1":
        return 2.0 * sigma * first
    if kind == "X3":
        return 2.0 * first
    if n % 2:
        raise ValueError(f"{kind} switches regime at N/2 and needs even n, got {n}")
    second = np.asarray(parts[_PARTS[kind][1]], dtype=float)
    half = n // 2
    out = np.empty(n)
    out[:half] = 4.0 * first[:half]
    out[half:] = second[half:]
    return sigma * out


def raw_parts(kind: str, n: int, seed) -> dict[str, np.ndarray]:
    """Independent draws of every process scenario ``kind`` uses."""
    if kind not in _PARTS:
        raise ValueError(f"unknown noise kind {kind!r}")
    names = _PARTS[kind]
    children = np.random.SeedSequence(int(seed)).spawn(len(names))
    parts = {}
    for name, child in zip(names, children):
        if name == "GARCH":
            parts[name] = simulate_garch(GARCH_X3, n, child)
        else:
            parts[name] = simulate_arma(_SPECS[name], n, child)
    return parts


def make_noise(kind: str, n: int, tau: float, seed) -> SampledSignal:
    return SampledSignal(compose_noise(kind, raw_parts(kind, n, seed), tau), tau)


def averaged_periodogram(draws, segment: int) -> tuple[np.ndarray, np.ndarray]:
    """Bartlett estimate of the spectral density from independent draws.

    Each row of ``draws`` is cut into non-overlapping segments of length
    ``segment``; the periodograms ``|sum x e^{-i xi t}|^2 / (2 pi segment)``
    are averaged. Returns angular frequencies in (0, pi) and the estimate.
    """
    x = np.atleast_2d(np.asarray(draws, dtype=float))
    if segment < 4 or x.shape[1] < segment:
        raise ValueError("segment must be >= 4 and no longer than a draw")
    count = x.shape[1] // segment
    pieces = x[:, : count * segment].reshape(-1, segment)
    pieces = pieces - pieces.mean(axis=1, keepdims=True)
    power = np.abs(np.fft.rfft(pieces, axis=1)) ** 2 / (2 * np.pi * segment)
    xi = 2 * np.pi * np.arange(power.shape[1]) / segment
    # drop DC (removed by centring) and Nyquist
    keep = slice(1, segment // 2)
    return xi[keep], power.mean(axis=0)[keep]
