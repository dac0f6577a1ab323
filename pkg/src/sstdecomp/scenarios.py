"""Named simulation scenarios with their ground truth.

Names:

* ``clean_s1_T1``, ``clean_s2_T1``, ``clean_s2_T2``: noise-free signals.
* ``Y0``: s1 + T1 + X1.
* ``Y_<j>_<k>_<sigma0>``: s2 + T_j + sigma0 * X_k, e.g. ``Y_1_2_1`` or ``Y_2_3_0.5``.
* any ``Y`` name with the suffix ``_O`` adds the two deterministic bursts.

Ground truth keeps the noise without bursts, so the residual is always
scored against the error process alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .noise import NOISE_KINDS, make_noise
from .synth import N_SAMPLES, TAU, SampledSignal, gen_bursts, gen_s1, gen_s2, gen_trend, sample

_Y_RE = re.compile(r"^Y_([12])_([1-5])_([0-9]*\.?[0-9]+)$")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    seasonal: str  # "s1" or "s2"
    trend: str  # "T1" or "T2"
    noise: str | None
    sigma0: float
    bursts: bool

    @property
    def component_names(self) -> tuple[str, str]:
        return ("s11", "s12") if self.seasonal == "s1" else ("s21", "s22")

    @property
    def targets(self) -> tuple[str, ...]:
        return self.component_names + ("T", "r")


@dataclass
class ScenarioDraw:
    spec: ScenarioSpec
    seed: int
    signal: SampledSignal
    truth: dict[str, np.ndarray]  # component names, "T" and "noise"


def parse_scenario(name: str) -> ScenarioSpec:
    base, bursts = (name[:-2], True) if name.endswith("_O") else (name, False)
    if base in ("clean_s1_T1", "clean_s2_T1", "clean_s2_T2"):
        if bursts:
            raise ValueError("bursts are only defined for noisy Y scenarios")
        _, seasonal, trend = base.split("_")
        return ScenarioSpec(name, seasonal, trend, None, 0.0, False)
    if base == "Y0":
        return ScenarioSpec(name, "s1", "T1", "X1", 1.0, bursts)
    m = _Y_RE.match(base)
    if not m:
        raise ValueError(f"unknown scenario {name!r}")
    j, k, sigma0 = m.groups()
    kind = f"X{k}"
    assert kind in NOISE_KINDS
    return ScenarioSpec(name, "s2", f"T{j}", kind, float(sigma0), bursts)


def build_scenario(name: str, seed: int = 0, n: int = N_SAMPLES, tau: float = TAU) -> ScenarioDraw:
    """Synthesize one realization of ``name`` on ``t = tau, 2 tau, ..., n tau``."""
    spec = parse_scenario(name)
    comps = gen_s1() if spec.seasonal == "s1" else gen_s2()
    truth = {cname: sample(c, tau, n).values for cname, c in zip(spec.component_names, comps)}
    truth["T"] = sample(gen_trend(spec.trend), tau, n).values
    if spec.noise is None or spec.sigma0 == 0.0:
        truth["noise"] = np.zeros(n)
    else:
        truth["noise"] = spec.sigma0 * make_noise(spec.noise, n, tau, seed).values
    y = truth[spec.component_names[0]] + truth[spec.component_names[1]] + truth["T"] + truth["noise"]
    if spec.bursts:
        y = y + gen_bursts(n, tau).values
    return ScenarioDraw(spec, int(seed), SampledSignal(y, tau), truth)


def restrict(draw: ScenarioDraw, t_max: float = 9.0) -> ScenarioDraw:
    """The same realization cut to samples with ``t <= t_max``."""
    keep = int(np.count_nonzero(draw.signal.times <= t_max + 1e-9 * draw.signal.tau))
    if keep < 2:
        raise ValueError("restriction leaves fewer than two samples")
    truth = {key: val[:keep].copy() for key, val in draw.truth.items()}
    sig = SampledSignal(draw.signal.values[:keep].copy(), draw.signal.tau, draw.signal.t0)
    return ScenarioDraw(draw.spec, draw.seed, sig, truth)
