"""Error metrics, the scenario batch runner, and two summary statistics."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .fileio import finite_or_none
from .reconstruct import AnalysisConfig, Decomposition, decompose
from .scenarios import ScenarioDraw, build_scenario, parse_scenario, restrict

RESTRICTED_SUFFIX = "_I"


def rrase(est, truth) -> float:
    """``||est - truth|| / ||truth||``."""
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"length mismatch: {est.shape} vs {truth.shape}")
    denom = np.linalg.norm(truth)
    if denom == 0:
        raise ValueError("reference has zero norm")
    return float(np.linalg.norm(est - truth) / denom)


def rrasd(a, b) -> float:
    """Relative difference of ``a`` from the reference ``b``; same formula as :func:`rrase`."""
    return rrase(a, b)


def _scores(dec: Decomposition, draw: ScenarioDraw) -> list[float]:
    names = draw.spec.component_names
    out = [rrase(dec.components[i].values, draw.truth[name]) for i, name in enumerate(names)]
    out.append(rrase(dec.trend, draw.truth["T"]))
    noise = draw.truth["noise"]
    out.append(rrase(dec.residual, noise) if np.any(noise != 0) else float("nan"))
    return out


def _pieces(dec: Decomposition) -> list[np.ndarray]:
    return [c.values for c in dec.components[:2]] + [dec.trend, dec.residual]


def _one_rep(args):
    name, seed, config, restricted = args
    draw = build_scenario(name, seed)
    t0 = time.perf_counter()
    full = decompose(draw.signal, config)
    elapsed = time.perf_counter() - t0
    if not restricted:
        return _scores(full, draw), None, elapsed
    sub = restrict(draw)
    t0 = time.perf_counter()
    part = decompose(sub.signal, config)
    elapsed = time.perf_counter() - t0
    m = len(sub.signal)
    diffs = [rrasd(p, f[:m]) for p, f in zip(_pieces(part), _pieces(full))]
    return _scores(part, sub), diffs, elapsed


@dataclass
class MetricReport:
    scenario: str
    targets: tuple[str, ...]
    seeds: list[int]
    rrase: np.ndarray  # (reps, targets)
    runtimes: np.ndarray
    rrasd: np.ndarray | None = None
    config: dict = field(default_factory=dict)

    @staticmethod
    def _sd(x):
        return np.std(x, axis=0, ddof=1) if x.shape[0] >= 2 else np.full(x.shape[1], np.nan)

    @property
    def mean(self) -> dict[str, float]:
        return dict(zip(self.targets, np.mean(self.rrase, axis=0).tolist()))

    @property
    def sd(self) -> dict[str, float]:
        return dict(zip(self.targets, self._sd(self.rrase).tolist()))

    @property
    def rrasd_mean(self) -> dict[str, float] | None:
        if self.rrasd is None:
            return None
        return dict(zip(self.targets, np.mean(self.rrasd, axis=0).tolist()))

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "reps": len(self.seeds),
            "seeds": list(self.seeds),
            "targets": list(self.targets),
            "rrase_mean": self.mean,
            "rrase_sd": self.sd,
            "runtime_mean": float(np.mean(self.runtimes)),
            "runtime_sd": float(self._sd(self.runtimes[:, None])[0]),
            "per_rep_rrase": self.rrase.tolist(),
            "config": self.config,
        }
        if self.rrasd is not None:
            out["rrasd_mean"] = self.rrasd_mean
            out["rrasd_sd"] = dict(zip(self.targets, self._sd(self.rrasd).tolist()))
            out["per_rep_rrasd"] = self.rrasd.tolist()
        return out

    def to_json(self) -> str:
        # NaN (residual of a clean scenario) becomes null
        return json.dumps(finite_or_none(self.to_dict()), indent=2, allow_nan=False)

    def table(self) -> str:
        mean, sd = self.mean, self.sd
        head = f"{self.scenario} ({len(self.seeds)} reps)"
        rows = [f"  {t:>4s}  {mean[t]:.4f} +- {sd[t]:.4f}" for t in self.targets]
        if self.rrasd is not None:
            rmean = self.rrasd_mean
            rows += [f"  RRASD {t:>4s}  {rmean[t]:.4f}" for t in self.targets]
        rows.append(f"  time  {np.mean(self.runtimes):.3f} s")
        return "\n".join([head] + rows)


def run_scenario(name: str, reps: int = 50, seed0: int = 0, config: AnalysisConfig | None = None,
                 workers: int = 1) -> MetricReport:
    """Synthesize, decompose and score ``reps`` realizations with seeds ``seed0 + r``.

    A name ending in ``_I`` analyzes each realization restricted to
    ``[0, 9]``, scores it against the restricted truth, and also records the
    RRASD between the restricted and full analyses on ``[0, 9]``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    config = config or AnalysisConfig()
    restricted = name.endswith(RESTRICTED_SUFFIX)
    base = name[: -len(RESTRICTED_SUFFIX)] if restricted else name
    spec = parse_scenario(base)
    seeds = [seed0 + r for r in range(reps)]
    jobs = [(base, s, config, restricted) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_rep, jobs))
    else:
        results = [_one_rep(j) for j in jobs]
    scores = np.array([r[0] for r in results], dtype=float)
    diffs = np.array([r[1] for r in results], dtype=float) if restricted else None
    runtimes = np.array([r[2] for r in results], dtype=float)
    return MetricReport(name, spec.targets, seeds, scores, runtimes, diffs, config.to_dict())


def sliding_if_std(if_series, tau: float, window: float) -> np.ndarray:
    """Sample sd (ddof=1) of ``if_series`` in consecutive non-overlapping windows.

    ``window`` is a duration; it spans ``round(window / tau)`` samples. A
    trailing partial window is dropped.
    """
    x = np.asarray(if_series, dtype=float)
    if not tau > 0:
        raise ValueError("tau must be positive")
    width = int(round(window / tau))
    if width < 2:
        raise ValueError("window must cover at least two samples")
    count = x.size // width
    if count == 0:
        return np.empty(0)
    return np.std(x[: count * width].reshape(count, width), axis=1, ddof=1)


def f_test_oneway(groups) -> tuple[float, float]:
    """Classical one-way ANOVA: ``F = MSB / MSW`` with (k-1, N-k) df and its upper-tail p.

    Zero within-group variance with a positive between-group spread gives
    ``(inf, 0.0)``; zero for both is an error.
    """
    groups = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    if any(g.size < 2 for g in groups):
        raise ValueError("each group needs at least two observations")
    k = len(groups)
    n_total = sum(g.size for g in groups)
    grand = np.concatenate(groups).mean()
    ssb = sum(g.size * (g.mean() - grand) ** 2 for g in groups)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in groups)
    df1, df2 = k - 1, n_total - k
    # round-off from the constant offset can leave tiny sums where the exact ones are 0
    scale = sum((g ** 2).sum() for g in groups) * 1e-14 + 1e-300
    if ssw <= scale:
        if ssb <= scale:
            raise ValueError("all groups are constant and equal; F is undefined")
        return float("inf"), 0.0
    f = (ssb / df1) / (ssw / df2)
    return float(f), f_upper_tail(f, df1, df2)


def f_upper_tail(f: float, df1: float, df2: float) -> float:
    """``P(F > f)`` for an F(df1, df2) variable, via the regularized incomplete beta function."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0:
        return 1.0
    if np.isinf(f):
        return 0.0
    return float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))
