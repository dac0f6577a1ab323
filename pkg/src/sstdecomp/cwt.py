"""Continuous wavelet transform on a dyadic voice grid, computed by FFT.

Arrays are laid out scale-major: ``w[i, n]`` is the coefficient at scale
``grid.scales[i]`` and padded time index ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .synth import SampledSignal
from .wavelet import MotherWavelet

DEFAULT_VOICES = 32


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def padded_length(n: int, mode="double") -> int:
    """Padded length for ``n`` samples.

    ``"double"``: smallest power of two >= 2n (default).
    ``"minimal"``: smallest power of two strictly greater than n.
    An int is taken as an explicit length and must be >= n.
    """
    if isinstance(mode, (int, np.integer)) and not isinstance(mode, bool):
        if mode < n:
            raise ValueError(f"padded length {mode} is smaller than the signal length {n}")
        return int(mode)
    if mode == "double":
        return next_pow2(2 * n)
    if mode == "minimal":
        return next_pow2(n + 1)
    raise ValueError(f"unknown pad mode {mode!r}")


BOUNDARIES = ("reflect", "symmetric")


def pad_reflect(x, target="double", boundary="reflect") -> tuple[np.ndarray, int]:
    """Mirror-pad ``x`` on both sides.

    ``boundary="reflect"`` mirrors about the edge samples without repeating
    them (``[1,2,3] -> [.., 3, 2, 1, 2, 3, 2, 1, ..]``); ``"symmetric"``
    mirrors about the half-sample point and repeats them. Returns the padded
    array and the number of samples added on the left; the original samples
    occupy ``padded[left:left + len(x)]``.
    """
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    x = np.asarray(x.values if isinstance(x, SampledSignal) else x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two samples to reflect")
    total = padded_length(n, target)
    extra = total - n
    left = extra // 2
    # numpy keeps folding when the pad exceeds the signal
    return np.pad(x, (left, extra - left), mode=boundary), left


@dataclass(frozen=True)
class ScaleGrid:
    n_voices: int
    scales: np.ndarray
    tau: float

    @property
    def delta_a(self) -> float:
        return 1.0 / self.n_voices

    @property
    def n_scales(self) -> int:
        return self.scales.size

    @property
    def weights(self) -> np.ndarray:
        """Quadrature step ``da`` at each scale on the log2 grid."""
        return self.scales * np.log(2.0) * self.delta_a


def make_scale_grid(n_padded: int, tau: float, n_voices: int = DEFAULT_VOICES,
                    wavelet: MotherWavelet | None = None) -> ScaleGrid:
    """Scales ``2**(i/n_voices) * tau`` for i = 1..L*n_voices, ``2**(L+1) = n_padded``.

    Scales whose passband lies entirely above Nyquist are dropped.
    """
    wavelet = wavelet or MotherWavelet()
    if n_padded < 4 or n_padded & (n_padded - 1):
        raise ValueError("n_padded must be a power of two >= 4")
    if n_voices < 1:
        raise ValueError("n_voices must be positive")
    octaves = int(np.log2(n_padded)) - 1
    i = np.arange(1, octaves * n_voices + 1)
    scales = 2.0 ** (i / n_voices) * tau
    lo, _ = wavelet.support
    scales = scales[lo / scales <= 1.0 / (2.0 * tau)]
    return ScaleGrid(n_voices, scales, tau)


@dataclass(frozen=True)
class CwtField:
    w: np.ndarray
    dw: np.ndarray
    grid: ScaleGrid
    n_padded: int
    n_original: int
    offset: int
    tau: float

    @property
    def scales(self) -> np.ndarray:
        return self.grid.scales


def cwt_forward(x_padded, grid: ScaleGrid, wavelet: MotherWavelet, *,
                n_original: int | None = None, offset: int = 0) -> CwtField:
    """Wavelet coefficients and their time derivative for an already padded series.

    The filter for scale ``a`` is ``sqrt(a) * hat(a * f)`` on the signed DFT
    frequencies ``f``; the derivative multiplies by ``2j*pi*f``. Because hat
    vanishes for negative frequencies the result is the analytic CWT.
    """
    x = np.asarray(x_padded, dtype=float)
    n = x.size
    if n & (n - 1):
        raise ValueError("input length must be a power of two; pad first")
    tau = grid.tau
    lo, hi = wavelet.support
    if np.any(lo / grid.scales > 1.0 / (2.0 * tau)) or grid.scales.max() > n * tau / 2 * (1 + 1e-12):
        raise ValueError("scale grid exceeds the band representable at this length")
    freqs = np.fft.fftfreq(n, d=tau)
    spectrum = np.fft.fft(x)
    af = np.outer(grid.scales, freqs)
    filt = np.sqrt(grid.scales)[:, None] * wavelet.hat(af)
    prod = spectrum[None, :] * filt
    w = np.fft.ifft(prod, axis=1)
    dw = np.fft.ifft(prod * (2j * np.pi * freqs)[None, :], axis=1)
    return CwtField(w, dw, grid, n, n if n_original is None else int(n_original), int(offset), tau)


def cwt(signal: SampledSignal, n_voices: int = DEFAULT_VOICES,
        wavelet: MotherWavelet | None = None, pad="double", boundary="reflect") -> CwtField:
    """Mirror-pad ``signal`` and transform it."""
    wavelet = wavelet or MotherWavelet()
    padded, left = pad_reflect(signal, pad, boundary)
    grid = make_scale_grid(padded.size, signal.tau, n_voices, wavelet)
    return cwt_forward(padded, grid, wavelet, n_original=len(signal), offset=left)
