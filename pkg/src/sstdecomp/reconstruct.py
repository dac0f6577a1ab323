"""Component, trend and residual reconstruction, and the full decomposition."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np

from .cwt import BOUNDARIES, CwtField, cwt
from .ridge import DEFAULT_LAMBDA, RidgeCurve, extract_k_ridges, if_from_ridge
from .sst import FrequencyGrid, SstField, default_threshold, reassignment, synchrosqueeze
from .synth import SampledSignal
from .wavelet import MotherWavelet

log = logging.getLogger(__name__)

AMP_FLOOR = 1e-12
C1_MARGIN = 0.8
MIN_CYCLES = 3.0

# The bump only sees positive frequencies, so the band integral of a real
# cosine returns half its analytic signal; every real-valued reconstruction
# is scaled by this factor.
REAL_SIGNAL_GAIN = 2.0


def _band_sum(field: CwtField, mask: np.ndarray) -> np.ndarray:
    weights = field.grid.weights * field.grid.scales ** -1.5
    return np.einsum("i,in->n", weights, np.where(mask, field.w, 0.0))


def component_reconstruct(field: CwtField, ridge: RidgeCurve, wavelet: MotherWavelet,
                          gamma: float, freq: FrequencyGrid | None = None,
                          squeezed: SstField | None = None) -> np.ndarray:
    """Complex component along ``ridge`` over all padded times.

    Without ``squeezed``: sums ``W a^{-3/2} da`` over scales in
    ``[(1-D)/f, (1+D)/f]`` where ``f`` is the ridge frequency and
    ``|W| > gamma``. With ``squeezed``: sums the squeezed field over the bins
    within ``[(1-D) f, (1+D) f]``. Either sum is scaled by ``2 / R_psi``.
    Times whose band is empty come out as 0.
    """
    freq = freq or FrequencyGrid.for_field(field)
    inst_freq = if_from_ridge(ridge, freq)
    if squeezed is not None:
        return _squeezed_band(squeezed, inst_freq, wavelet)
    lo_d, hi_d = wavelet.support
    a = field.grid.scales[:, None]
    in_band = (a >= lo_d / inst_freq[None, :]) & (a <= hi_d / inst_freq[None, :])
    empty = ~in_band.any(axis=0)
    if empty.any():
        warnings.warn(f"{int(empty.sum())} samples have no scale in their band; set to 0",
                      RuntimeWarning, stacklevel=2)
    mask = in_band & (np.abs(field.w) > gamma)
    return REAL_SIGNAL_GAIN / wavelet.r_psi * _band_sum(field, mask)


def _squeezed_band(squeezed: SstField, inst_freq: np.ndarray, wavelet: MotherWavelet) -> np.ndarray:
    lo_d, hi_d = wavelet.support
    xi = squeezed.freq.bins[:, None]
    mask = (xi >= lo_d * inst_freq[None, :]) & (xi <= hi_d * inst_freq[None, :])
    return REAL_SIGNAL_GAIN / wavelet.r_psi * np.einsum("jn,jn->n", mask, squeezed.s)


@dataclass
class PhaseEstimate:
    am: np.ndarray
    phase: np.ndarray
    interpolated: np.ndarray


def am_phase(fc, gamma: float = 0.0) -> PhaseEstimate:
    """Amplitude ``|fc|`` and unwrapped phase of ``fc`` in cycles.

    Increments between kept samples are taken in (-0.5, 0.5]. Samples with
    amplitude at or below ``max(gamma, 1e-12 * max|fc|)`` get a phase
    interpolated from their neighbours and are flagged in ``interpolated``.
    """
    fc = np.asarray(fc, dtype=complex)
    am = np.abs(fc)
    floor = max(gamma, AMP_FLOOR * (am.max() if am.size else 0.0))
    good = am > floor
    phase = np.zeros(fc.size)
    if good.sum() == 0:
        return PhaseEstimate(am, phase, ~good)
    idx = np.flatnonzero(good)
    raw = np.angle(fc[idx]) / (2 * np.pi)
    steps = np.diff(raw)
    steps -= np.ceil(steps - 0.5)
    kept = raw[0] + np.concatenate(([0.0], np.cumsum(steps)))
    phase = np.interp(np.arange(fc.size), idx, kept)
    return PhaseEstimate(am, phase, ~good)


def trend_estimate(y, field: CwtField, wavelet: MotherWavelet, c1: float) -> np.ndarray:
    """``Y - Re(2/R_psi * sum over a <= (1+D)/c1 of W a^{-3/2} da)`` on the original samples."""
    values = np.asarray(y.values if isinstance(y, SampledSignal) else y, dtype=float)
    nyquist = 1.0 / (2.0 * field.tau)
    if not 0.0 < c1 < nyquist:
        raise ValueError(f"c1={c1} must lie in (0, {nyquist})")
    _, hi_d = wavelet.support
    mask = np.broadcast_to((field.grid.scales <= hi_d / c1)[:, None], field.w.shape)
    seasonal = REAL_SIGNAL_GAIN / wavelet.r_psi * _band_sum(field, mask)
    sl = slice(field.offset, field.offset + values.size)
    return values - seasonal[sl].real


@dataclass(frozen=True)
class AnalysisConfig:
    n_voices: int = 32
    delta: float = 0.3
    lam: float = DEFAULT_LAMBDA
    k: int = 2
    gamma: Union[float, str] = "auto"
    kappa: float = 1.0
    c1: Union[float, str] = "auto"
    d: float = 0.5
    band_frac: Union[float, None] = None
    pad: Union[str, int] = "double"
    boundary: str = "symmetric"
    min_cycles: float = MIN_CYCLES
    reconstruction: str = "sst"
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n_voices < 4:
            raise ValueError("n_voices must be >= 4")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.delta < self.d / (1 + self.d):
            raise ValueError(f"delta={self.delta} must be < d/(1+d) with d={self.d}")
        if self.gamma != "auto" and not float(self.gamma) >= 0:
            raise ValueError("gamma must be 'auto' or a non-negative number")
        if self.c1 != "auto" and not float(self.c1) > 0:
            raise ValueError("c1 must be 'auto' or positive")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.reconstruction not in ("sst", "cwt"):
            raise ValueError("reconstruction must be 'sst' or 'cwt'")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if not self.min_cycles >= 0:
            raise ValueError("min_cycles must be non-negative")
        if self.band_frac is not None and not 0 < self.band_frac < 1:
            raise ValueError("band_frac must lie in (0, 1)")

    @property
    def wavelet(self) -> MotherWavelet:
        return MotherWavelet(self.delta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Component:
    complex_form: np.ndarray
    am: np.ndarray
    phase: np.ndarray
    inst_freq: np.ndarray
    interpolated: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.complex_form.real


def _empty_component(n: int) -> Component:
    """Placeholder for a ridge that could not be extracted: zero values, NaN IF."""
    zeros = np.zeros(n)
    return Component(zeros.astype(complex), zeros.copy(), zeros.copy(), np.full(n, np.nan),
                     np.ones(n, dtype=bool))


@dataclass
class Decomposition:
    """Per-component estimates, trend and residual on the original samples."""

    y: np.ndarray
    tau: float
    components: list[Component]
    trend: np.ndarray
    residual: np.ndarray
    gamma: float
    c1: float
    r_psi: float
    ridges: list[RidgeCurve] = field(default_factory=list)
    cwt: CwtField | None = None
    sst: SstField | None = None

    @property
    def seasonal(self) -> np.ndarray:
        total = np.zeros_like(self.y)
        for comp in self.components:
            total += comp.values
        return total

    def ledger_error(self) -> float:
        return float(np.max(np.abs(self.y - self.seasonal - self.trend - self.residual), initial=0.0))


def decompose(y: SampledSignal, config: AnalysisConfig | None = None) -> Decomposition:
    """Pad, transform, squeeze, track ``k`` ridges, reconstruct, estimate the trend.

    Ridges are searched only above ``min_cycles / (N tau)``: slower
    oscillations are indistinguishable from trend over the record.
    ``c1="auto"`` uses 0.8 times the smallest instantaneous frequency of the
    lowest ridge over the original samples.
    """
    config = config or AnalysisConfig()
    wavelet = config.wavelet
    values = y.values
    n = values.size
    if not np.any(values != 0):
        warnings.warn("all-zero input; returning an all-zero decomposition", RuntimeWarning, stacklevel=2)
        comps = [_empty_component(n) for _ in range(config.k)]
        return Decomposition(values.copy(), y.tau, comps, np.zeros(n), np.zeros(n), 0.0,
                             float("nan"), wavelet.r_psi)

    field_ = cwt(y, config.n_voices, wavelet, config.pad, config.boundary)
    omega = reassignment(field_)
    gamma = default_threshold(field_, config.kappa) if config.gamma == "auto" else float(config.gamma)
    freq = FrequencyGrid.for_field(field_)
    squeezed = synchrosqueeze(field_, omega, gamma, freq)
    sl = slice(field_.offset, field_.offset + n)

    band_frac = config.delta if config.band_frac is None else config.band_frac
    if np.any(squeezed.s != 0):
        min_bin = max(1, math.ceil(config.min_cycles / (n * y.tau) / freq.delta_xi))
        ridges = extract_k_ridges(squeezed, config.k, config.lam, band_frac, min_bin=min_bin)
    else:
        warnings.warn("threshold removed every coefficient; no ridges", RuntimeWarning, stacklevel=2)
        ridges = []

    components = []
    for ridge in ridges:
        fc = component_reconstruct(field_, ridge, wavelet, gamma, freq,
                                   squeezed if config.reconstruction == "sst" else None)[sl]
        est = am_phase(fc, gamma)
        components.append(Component(fc, est.am, est.phase, if_from_ridge(ridge, freq)[sl],
                                    est.interpolated))

    found = len(components)
    components += [_empty_component(n) for _ in range(config.k - found)]

    if config.c1 != "auto":
        c1 = float(config.c1)
        trend = trend_estimate(values, field_, wavelet, c1)
    elif found:
        c1 = C1_MARGIN * float(components[0].inst_freq.min())
        trend = trend_estimate(values, field_, wavelet, c1)
    else:
        # nothing seasonal was found, so nothing is removed from the trend
        c1 = float("nan")
        trend = values.copy()
    seasonal = np.zeros(n)
    for comp in components:
        seasonal += comp.values
    residual = values - seasonal - trend
    return Decomposition(values.copy(), y.tau, components, trend, residual, gamma, c1,
                         wavelet.r_psi, ridges, field_, squeezed)
