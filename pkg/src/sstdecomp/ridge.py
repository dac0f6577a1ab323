"""Ridge extraction on the squeezed field by exact dynamic programming.

A ridge maximises

    sum_m log(|s[c(m), m]| / sum|s|) - lam * sum_m (c(m) - c(m-1))**2

over all bin sequences ``c``. The inner maximisation over the previous bin
is a max-plus convolution with a concave quadratic, which the lower-envelope
(generalised distance transform) algorithm solves in linear time per column,
so the unrestricted optimum costs O(n_bins * n_times).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .sst import FrequencyGrid, SstField

LOG_FLOOR = 1e-16
DEFAULT_LAMBDA = 20.0
_LAM_SAFE_LO, _LAM_SAFE_HI = 1e-150, 1e150


@dataclass(frozen=True)
class RidgeCurve:
    """``bins[n]`` is the one-based frequency bin at padded time ``n``."""

    bins: np.ndarray
    lam: float
    score: float


@numba.njit(cache=True)
def _envelope_max(v, lam, out_val, out_arg, loc, bounds):
    # out_val[c] = max_c' v[c'] - lam (c - c')^2; ties go to the lower c'
    n = v.shape[0]
    k = 0
    loc[0] = 0
    bounds[0] = -np.inf
    bounds[1] = np.inf
    for q in range(1, n):
        fq = -v[q] + lam * q * q
        p = loc[k]
        s = (fq - (-v[p] + lam * p * p)) / (2.0 * lam * (q - p))
        while k > 0 and s <= bounds[k]:
            k -= 1
            p = loc[k]
            s = (fq - (-v[p] + lam * p * p)) / (2.0 * lam * (q - p))
        k += 1
        loc[k] = q
        bounds[k] = s
        bounds[k + 1] = np.inf
    k = 0
    for q in range(n):
        while bounds[k + 1] < q:
            k += 1
        p = loc[k]
        out_arg[q] = p
        out_val[q] = v[p] - lam * (q - p) * (q - p)


@numba.njit(cache=True)
def _window_max(v, lam, window, out_val, out_arg):
    n = v.shape[0]
    for c in range(n):
        lo = max(0, c - window)
        hi = min(n - 1, c + window)
        best = -np.inf
        arg = lo
        for p in range(lo, hi + 1):
            val = v[p] - lam * (c - p) * (c - p)
            if val > best:
                best = val
                arg = p
        out_val[c] = best
        out_arg[c] = arg


@numba.njit(cache=True)
def _dp(data, lam, window):
    # data is (n_bins, n_times); window < 0 means unrestricted
    n_bins, n_t = data.shape
    back = np.empty((n_t, n_bins), dtype=np.int64)
    val = data[:, 0].copy()
    nxt = np.empty(n_bins)
    arg = np.empty(n_bins, dtype=np.int64)
    loc = np.empty(n_bins, dtype=np.int64)
    bounds = np.empty(n_bins + 1)
    for m in range(1, n_t):
        if window >= 0:
            _window_max(val, lam, window, nxt, arg)
        elif lam == 0.0:
            p = 0
            for c in range(1, n_bins):
                if val[c] > val[p]:
                    p = c
            for c in range(n_bins):
                nxt[c] = val[p]
                arg[c] = p
        elif not (_LAM_SAFE_LO < lam < _LAM_SAFE_HI):
            # the envelope intersections under- or overflow; scan every bin pair instead
            _window_max(val, lam, n_bins, nxt, arg)
        else:
            _envelope_max(val, lam, nxt, arg, loc, bounds)
        for c in range(n_bins):
            back[m, c] = arg[c]
            val[c] = nxt[c] + data[c, m]
    path = np.empty(n_t, dtype=np.int64)
    best = 0
    for c in range(1, n_bins):
        if val[c] > val[best]:
            best = c
    score = val[best]
    path[n_t - 1] = best
    for m in range(n_t - 1, 0, -1):
        path[m - 1] = back[m, path[m]]
    return path, score


def data_term(mag: np.ndarray) -> np.ndarray:
    """``log(|s| / total)`` with empty cells floored at ``LOG_FLOOR``."""
    total = mag.sum()
    return np.log(np.maximum(mag / total, LOG_FLOOR))


def functional(mag: np.ndarray, path: np.ndarray, lam: float) -> float:
    """Objective value of a zero-based bin path; used by tests and for scores."""
    d = data_term(mag)
    jumps = np.diff(path).astype(float)
    return float(d[path, np.arange(path.size)].sum() - lam * np.sum(jumps ** 2))


def _optimal_path(mag: np.ndarray, lam: float, window: int | None) -> tuple[np.ndarray, float]:
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if not np.any(mag > 0):
        raise ValueError("cannot extract a ridge from an all-zero field")
    data = np.ascontiguousarray(data_term(mag))
    path, score = _dp(data, float(lam), -1 if window is None else int(window))
    return path, float(score)


def default_window(n_bins: int) -> int:
    return max(1, math.ceil(0.05 * n_bins))


def extract_ridge(s, lam: float = DEFAULT_LAMBDA, window: int | None = None) -> RidgeCurve:
    """Globally optimal ridge of ``|s|``.

    ``s`` is an :class:`SstField` or a (n_bins, n_times) array. ``window``
    limits each step to ``|c(m) - c(m-1)| <= window``; None is unrestricted.
    """
    mag = np.abs(s.s if isinstance(s, SstField) else np.asarray(s))
    path, score = _optimal_path(mag, lam, window)
    return RidgeCurve(path + 1, float(lam), score)


def extract_k_ridges(s, k: int, lam: float = DEFAULT_LAMBDA, band_frac: float = 0.3,
                     window: int | None = None, min_bin: int = 1) -> list[RidgeCurve]:
    """Extract up to ``k`` ridges by peeling.

    After each extraction the bins within ``bins[n] * (1 +- band_frac)`` are
    zeroed at every time. Bins below ``min_bin`` (one-based) are never
    visited with positive mass. Results are sorted by mean frequency, ascending.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if min_bin < 1:
        raise ValueError("min_bin must be >= 1")
    mag = np.abs(s.s if isinstance(s, SstField) else np.asarray(s)).copy()
    n_bins, n_t = mag.shape
    mag[: min_bin - 1] = 0.0
    bin_numbers = np.arange(1, n_bins + 1)[:, None]
    ridges = []
    for _ in range(k):
        if not np.any(mag > 0):
            warnings.warn(f"only {len(ridges)} of {k} ridges carry mass", RuntimeWarning, stacklevel=2)
            break
        path, score = _optimal_path(mag, lam, window)
        bins = path + 1
        ridges.append(RidgeCurve(bins, float(lam), score))
        lo = bins * (1.0 - band_frac)
        hi = bins * (1.0 + band_frac)
        mag[(bin_numbers >= lo[None, :]) & (bin_numbers <= hi[None, :])] = 0.0
    ridges.sort(key=lambda r: r.bins.mean())
    return ridges


def if_from_ridge(ridge: RidgeCurve, freq: FrequencyGrid) -> np.ndarray:
    return ridge.bins * freq.delta_xi
