"""Seasonal, trend and residual decomposition by the wavelet synchrosqueezing transform."""

from .cwt import CwtField, ScaleGrid, cwt, make_scale_grid, pad_reflect
from .evaluate import MetricReport, f_test_oneway, rrasd, rrase, run_scenario, sliding_if_std
from .noise import ArmaSpec, GarchSpec, make_noise, simulate_arma, simulate_garch
from .reconstruct import AnalysisConfig, Decomposition, decompose
from .ridge import RidgeCurve, extract_k_ridges, extract_ridge
from .sst import FrequencyGrid, SstField, synchrosqueeze
from .synth import SampledSignal, gen_s1, gen_s2, gen_trend, sample
from .wavelet import MotherWavelet, bump_hat

__version__ = "0.1.0"
