"""Reassignment rule and synchrosqueezing of a CWT field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cwt import CwtField

OMEGA_FLOOR = 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    """Bins ``xi_j = j * delta_xi`` for j = 1..n_bins covering [1/(N' tau), 1/(2 tau))."""

    delta_xi: float
    n_bins: int

    @classmethod
    def for_field(cls, field: CwtField) -> "FrequencyGrid":
        n_bins = field.n_padded // 2 - 1
        if n_bins < 1:
            raise ValueError("padded length too short for a frequency grid")
        return cls(1.0 / (field.n_padded * field.tau), n_bins)

    @property
    def bins(self) -> np.ndarray:
        return self.delta_xi * np.arange(1, self.n_bins + 1)


@dataclass(frozen=True)
class SstField:
    """Squeezed field ``s[j - 1, n]`` for bin j and padded time n."""

    s: np.ndarray
    omega: np.ndarray
    gamma: float
    freq: FrequencyGrid


def reassignment(field: CwtField, floor: float = OMEGA_FLOOR) -> np.ndarray:
    """Real part of ``-i dW / (2 pi W)``; NaN where ``|W|`` is below
    ``floor * max|W|`` (and everywhere for an all-zero field)."""
    mag = np.abs(field.w)
    peak = mag.max() if mag.size else 0.0
    omega = np.full(field.w.shape, np.nan)
    if peak == 0.0:
        return omega
    ok = mag >= floor * peak
    omega[ok] = np.real(-1j * field.dw[ok] / (2 * np.pi * field.w[ok]))
    return omega


def default_threshold(field: CwtField, kappa: float = 1.0) -> float:
    """Noise-floor threshold from the finest octave of scales.

    ``kappa * median(|W|) / 0.6745 * sqrt(2 ln N')`` with the median taken
    over the first ``n_voices`` scales and every padded time.
    """
    finest = np.abs(field.w[: field.grid.n_voices])
    if finest.size == 0:
        return 0.0
    sigma = np.median(finest) / 0.6745
    return float(kappa * sigma * np.sqrt(2.0 * np.log(field.n_padded)))


def _contributions(field: CwtField) -> np.ndarray:
    """``W * a^{-3/2} da`` on the log grid, per cell."""
    return field.w * (field.grid.weights * field.grid.scales ** -1.5)[:, None]


def synchrosqueeze(field: CwtField, omega: np.ndarray, gamma: float,
                   freq: FrequencyGrid | None = None) -> SstField:
    """Move each retained CWT cell into the frequency bin nearest its ``omega``.

    A cell is retained when ``|W| >= gamma``, its ``omega`` is defined, and the
    nearest bin lies in 1..n_bins. Each cell lands in at most one bin.
    """
    freq = freq or FrequencyGrid.for_field(field)
    if omega.shape != field.w.shape:
        raise ValueError("omega and W shapes differ")
    n_t = field.n_padded
    j = np.full(omega.shape, -1, dtype=np.int64)
    finite = np.isfinite(omega)
    j[finite] = np.rint(omega[finite] / freq.delta_xi).astype(np.int64)
    keep = finite & (np.abs(field.w) >= gamma) & (j >= 1) & (j <= freq.n_bins)
    contrib = _contributions(field)[keep]
    time_idx = np.broadcast_to(np.arange(n_t), omega.shape)[keep]
    flat = (j[keep] - 1) * n_t + time_idx
    size = freq.n_bins * n_t
    s = (np.bincount(flat, weights=contrib.real, minlength=size)
         + 1j * np.bincount(flat, weights=contrib.imag, minlength=size))
    return SstField(s.reshape(freq.n_bins, n_t), omega, float(gamma), freq)


def sst(field: CwtField, gamma: float | str = "auto", kappa: float = 1.0) -> SstField:
    omega = reassignment(field)
    if gamma == "auto":
        gamma = default_threshold(field, kappa)
    return synchrosqueeze(field, omega, float(gamma))
