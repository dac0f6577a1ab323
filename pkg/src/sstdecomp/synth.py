"""Deterministic test signals: seasonal components, trends, bursts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

TAU = 0.01
N_SAMPLES = 1000


@dataclass(frozen=True)
class ImfComponent:
    """One oscillatory component ``am(t) * cos(2*pi*phase(t))``.

    ``phase`` is in cycles and ``inst_freq`` is its derivative in cycles per
    unit time.
    """

    am: Callable[[np.ndarray], np.ndarray]
    phase: Callable[[np.ndarray], np.ndarray]
    inst_freq: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.am(t) * np.cos(2 * np.pi * self.phase(t))


@dataclass(frozen=True)
class SampledSignal:
    values: np.ndarray
    tau: float
    t0: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a sampled signal needs at least two samples")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.tau * np.arange(1, self.values.size + 1)


def _const(c):
    return lambda t: np.full(np.shape(t), float(c))


def gen_s1() -> tuple[ImfComponent, ImfComponent]:
    """Two pure tones: 2.5 cos(2 pi t) and 3 cos(2 pi^2 t)."""
    s11 = ImfComponent(am=_const(2.5), phase=lambda t: np.asarray(t, float), inst_freq=_const(1.0))
    s12 = ImfComponent(
        am=_const(3.0), phase=lambda t: np.pi * np.asarray(t, float), inst_freq=_const(np.pi)
    )
    return s11, s12


def _a1(t):
    return 2.0 + 0.5 * (1.0 + 0.1 * np.cos(t)) * np.arctan(t - 13.0)


def _a2(t):
    t = np.asarray(t, dtype=float)
    # right-open jump at 7.5, no smoothing
    return np.where(t <= 7.5, 3.5, 2.0)


def gen_s2() -> tuple[ImfComponent, ImfComponent]:
    """Two amplitude/frequency-modulated components on [0, 10]."""
    s21 = ImfComponent(
        am=_a1,
        phase=lambda t: t + 0.1 * np.sin(t),
        inst_freq=lambda t: 1.0 + 0.1 * np.cos(t),
    )
    s22 = ImfComponent(
        am=_a2,
        phase=lambda t: 3.4 * t - 0.02 * np.power(t, 2.3),
        inst_freq=lambda t: 3.4 - 0.046 * np.power(t, 1.3),
    )
    return s21, s22


def gen_trend(which: str) -> Callable[[np.ndarray], np.ndarray]:
    if which == "T1":
        return lambda t: 8.0 * (1.0 / (1.0 + (np.asarray(t, float) / 5.0) ** 2) + np.exp(-np.asarray(t, float) / 10.0))
    if which == "T2":
        return lambda t: 2.0 * np.asarray(t, float) + 10.0 * np.exp(-((np.asarray(t, float) - 4.0) ** 2) / 6.0)
    raise ValueError(f"unknown trend {which!r}; expected 'T1' or 'T2'")


def sample(fn, tau: float = TAU, n: int = N_SAMPLES, t0: float = 0.0) -> SampledSignal:
    """Sample ``fn`` at ``t0 + l*tau`` for l = 1..n."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    if n < 2:
        raise ValueError("n must be >= 2")
    t = t0 + tau * np.arange(1, n + 1)
    values = np.asarray(fn(t), dtype=float)
    if values.shape != t.shape:
        values = np.broadcast_to(values, t.shape).astype(float)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValueError(f"non-finite value at sample {bad} (t={t[bad]!r})")
    return SampledSignal(values, tau, t0)


def gen_bursts(n: int = N_SAMPLES, tau: float = TAU) -> SampledSignal:
    """Kronecker spikes: +18 at index 4/tau and -20 at index 7/tau.

    Indices follow the one-based sampling convention, so time ``l*tau`` is
    stored at array position ``l - 1``.
    """
    values = np.zeros(n)
    for t_burst, height in ((4.0, 18.0), (7.0, -20.0)):
        idx = t_burst / tau
        if abs(idx - round(idx)) > 1e-9:
            raise ValueError(f"burst time {t_burst} is not on the sampling grid")
        idx = int(round(idx))
        if not 1 <= idx <= n:
            raise ValueError(f"burst index {idx} outside 1..{n}")
        values[idx - 1] = height
    return SampledSignal(values, tau)
