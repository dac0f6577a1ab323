"""Always-on property checks, runnable without pytest (``sstdecomp selftest``)."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .cwt import ScaleGrid, cwt_forward, make_scale_grid
from .evaluate import f_test_oneway, f_upper_tail
from .noise import ARMA1, ARMA2, ARMA3, ARMA4, arma_spectral_density, averaged_periodogram, simulate_arma
from .reconstruct import AnalysisConfig, decompose
from .ridge import extract_ridge, functional
from .scenarios import build_scenario
from .sst import reassignment
from .synth import sample
from .wavelet import MotherWavelet, bump_hat


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f} s)"


def check_omega_exact() -> CheckResult:
    """A tone on the DFT grid of an unpadded periodic record has omega == xi0 wherever W is non-negligible."""
    n, tau = 1024, 0.01
    xi0 = 100 / (n * tau)
    x = np.cos(2 * np.pi * xi0 * tau * np.arange(n))
    wavelet = MotherWavelet()
    field = cwt_forward(x, make_scale_grid(n, tau, 32, wavelet), wavelet)
    omega = reassignment(field)
    live = np.abs(field.w) >= 1e-3 * np.abs(field.w).max()
    err = float(np.max(np.abs(omega[live] - xi0)))
    return CheckResult("pure-tone omega exactness", err < 1e-6, f"max |omega - xi0| = {err:.2e} (< 1e-6)")


def check_tone_amplitude() -> CheckResult:
    y = sample(lambda t: 2.5 * np.cos(2 * np.pi * t))
    dec = decompose(y, AnalysisConfig(k=1))
    am = dec.components[0].am[100:900]
    err = float(np.max(np.abs(am - 2.5)) / 2.5)
    return CheckResult("pure-tone amplitude", err < 0.01, f"max relative AM error {err:.2e} (< 1e-2) on interior samples")


def _all_paths(n_bins: int, n_t: int) -> np.ndarray:
    return np.array(list(itertools.product(range(n_bins), repeat=n_t)), dtype=np.int64)


def check_dp_exhaustive(seeds: int = 100, lam: float = 0.5) -> CheckResult:
    n_bins, n_t = 6, 8
    paths = _all_paths(n_bins, n_t)
    penalty = lam * np.sum(np.diff(paths, axis=1) ** 2, axis=1)
    cols = np.arange(n_t)
    mismatches = 0
    for seed in range(seeds):
        mag = np.random.default_rng(seed).random((n_bins, n_t))
        d = np.log(np.maximum(mag / mag.sum(), 1e-16))
        scores = d[paths, cols].sum(axis=1) - penalty
        best = int(np.argmax(scores))
        ridge = extract_ridge(mag, lam)
        same = np.array_equal(ridge.bins - 1, paths[best])
        close = abs(functional(mag, ridge.bins - 1, lam) - scores[best]) <= 1e-9 * abs(scores[best])
        mismatches += not (same and close)
    return CheckResult("DP vs exhaustive ridge", mismatches == 0,
                       f"{mismatches} mismatches over {seeds} random 6-bin x 8-time grids")


def _psi_time(t, delta: float, panels: int = 300, order: int = 16) -> np.ndarray:
    # inverse Fourier integral of the bump by composite Gauss-Legendre
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(1 - delta, 1 + delta, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    xi = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel() * bump_hat(xi, delta)
    return np.exp(2j * np.pi * np.outer(t, xi)) @ w


def direct_cwt(x, scales, tau: float, delta: float = 0.3, wraps: int = 6) -> np.ndarray:
    """Circular time-domain CWT ``sum_m x_m tau a^{-1/2} psi((n - m) tau / a)`` with periodized psi."""
    x = np.asarray(x, dtype=float)
    n = x.size
    d = np.arange(n)
    p = np.arange(-wraps, wraps + 1)
    lag = (d[:, None] - d[None, :]) % n
    rows = []
    for a in scales:
        arg = ((d[:, None] + p[None, :] * n) * tau / a).ravel()
        kernel = tau / np.sqrt(a) * _psi_time(arg, delta).reshape(n, -1).sum(axis=1)
        rows.append(kernel[lag] @ x)
    return np.array(rows)


def check_fft_vs_direct() -> CheckResult:
    n, tau = 256, 1.0
    x = np.random.default_rng(1).standard_normal(n)
    scales = np.array([3.0, 4.0, 5.0])
    field = cwt_forward(x, ScaleGrid(32, scales, tau), MotherWavelet())
    ref = direct_cwt(x, scales, tau)
    err = float(np.max(np.abs(field.w - ref)) / np.max(np.abs(ref)))
    return CheckResult("FFT vs direct CWT", err < 1e-8, f"max relative difference {err:.2e} (< 1e-8), length 256")


def check_arma_periodogram(reps: int = 200, length: int = 2 ** 14, segment: int = 1024) -> CheckResult:
    worst = 0.0
    for spec in (ARMA1, ARMA2, ARMA3, ARMA4):
        seeds = np.random.SeedSequence(2024).spawn(reps)
        draws = np.array([simulate_arma(spec, length, s) for s in seeds])
        xi, est = averaged_periodogram(draws, segment)
        dens = arma_spectral_density(spec, xi, spec.innovation_variance)
        worst = max(worst, float(np.linalg.norm(est - dens) / np.linalg.norm(dens)))
    return CheckResult("ARMA periodogram vs density", worst < 0.05,
                       f"worst relative L2 error {worst:.4f} (< 0.05) over the four ARMA specs")


def check_ledger() -> CheckResult:
    draw = build_scenario("Y_1_2_1", seed=3)
    dec = decompose(draw.signal)
    err = dec.ledger_error()
    tol = 8 * np.finfo(float).eps * np.max(np.abs(dec.y)) * (len(dec.components) + 2)
    return CheckResult("decomposition ledger", err <= tol, f"max |y - sum f - T - r| = {err:.1e} (<= {tol:.1e})")


def f_density(x, df1: float, df2: float) -> float:
    """F(df1, df2) density written out with log-gamma."""
    if x <= 0:
        return 0.0
    h1, h2 = df1 / 2.0, df2 / 2.0
    log_norm = math.lgamma(h1 + h2) - math.lgamma(h1) - math.lgamma(h2) + h1 * math.log(df1 / df2)
    return math.exp(log_norm + (h1 - 1) * math.log(x) - (h1 + h2) * math.log1p(df1 * x / df2))


def f_tail_by_quadrature(f: float, df1: float, df2: float) -> float:
    return quad(f_density, f, np.inf, args=(df1, df2), epsabs=1e-13, epsrel=1e-12)[0]


def check_f_test() -> CheckResult:
    # [1,2,3,4] vs [3,4,5,6]: means 2.5 and 4.5 around 3.5, so SSB = 8, SSW = 5 + 5, F = 8 / (10/6)
    f, p = f_test_oneway([[1, 2, 3, 4], [3, 4, 5, 6]])
    p_ref = f_tail_by_quadrature(4.8, 1, 6)
    tail8 = f_upper_tail(8.0, 1, 6)
    tail8_ref = f_tail_by_quadrature(8.0, 1, 6)
    ok = abs(f - 4.8) < 1e-12 and abs(p - p_ref) < 1e-8 and abs(tail8 - tail8_ref) < 1e-8
    return CheckResult("F-test", ok,
                       f"groups example F = {f:.6f} (hand 4.8), p = {p:.6f} (quadrature {p_ref:.6f}); "
                       f"P(F(1,6) > 8) = {tail8:.6f} (quadrature {tail8_ref:.6f})")


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_omega_exact,
    check_tone_amplitude,
    check_dp_exhaustive,
    check_fft_vs_direct,
    check_arma_periodogram,
    check_ledger,
    check_f_test,
)


def run_all(echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        try:
            res = check()
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            res = CheckResult(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if echo:
            echo(res.line())
    return results
