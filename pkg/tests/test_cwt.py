import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sstdecomp.cwt import (ScaleGrid, cwt, cwt_forward, make_scale_grid, next_pow2, pad_reflect,
                           padded_length)
from sstdecomp.selftest import direct_cwt
from sstdecomp.synth import SampledSignal
from sstdecomp.wavelet import MotherWavelet

WAVELET = MotherWavelet()


def fold_oracle(x, total, symmetric=False):
    # index-by-index mirror, independent of np.pad
    n = len(x)
    left = (total - n) // 2
    period = 2 * n if symmetric else 2 * n - 2
    out = []
    for k in range(total):
        j = (k - left) % period
        if symmetric:
            out.append(x[j] if j < n else x[period - 1 - j])
        else:
            out.append(x[j] if j < n else x[period - j])
    return np.array(out, dtype=float), left


def test_pad_example():
    p, left = pad_reflect(np.array([1.0, 2, 3, 4]), 8)
    np.testing.assert_array_equal(p, [3, 2, 1, 2, 3, 4, 3, 2])
    assert left == 2


def test_pad_identity_at_power_of_two():
    x = np.arange(8.0)
    p, left = pad_reflect(x, 8)
    np.testing.assert_array_equal(p, x)
    assert left == 0


def test_pad_constant():
    p, _ = pad_reflect(np.full(1000, 3.5))
    assert p.size == 2048 and np.all(p == 3.5)


def test_pad_rejects_short_target():
    with pytest.raises(ValueError):
        pad_reflect(np.arange(10.0), 8)
    with pytest.raises(ValueError):
        pad_reflect(np.arange(10.0), boundary="periodic")


@given(st.integers(2, 300), st.booleans(), st.sampled_from(["double", "minimal"]))
def test_pad_matches_fold_oracle(n, symmetric, mode):
    x = np.random.default_rng(n).standard_normal(n)
    total = padded_length(n, mode)
    got, left = pad_reflect(x, mode, "symmetric" if symmetric else "reflect")
    ref, ref_left = fold_oracle(x, total, symmetric)
    assert left == ref_left
    np.testing.assert_array_equal(got, ref)
    np.testing.assert_array_equal(got[left:left + n], x)


def test_padded_lengths():
    assert padded_length(1000) == 2048
    assert padded_length(1024) == 2048
    assert padded_length(1000, "minimal") == 1024
    assert next_pow2(1) == 1 and next_pow2(5) == 8


def test_scale_grid_invariants():
    tau, n_pad = 0.01, 2048
    g = make_scale_grid(n_pad, tau, 32)
    assert np.all(np.diff(g.scales) > 0)
    assert g.scales[0] >= tau
    assert g.scales[-1] <= n_pad * tau / 2 * (1 + 1e-12)
    # no row whose whole passband is above Nyquist
    assert np.all(0.7 / g.scales <= 1 / (2 * tau))
    v = np.log2(g.scales / tau) * 32
    np.testing.assert_allclose(v, np.rint(v), atol=1e-9)


def tone_field(tau=1 / 128, n=1024):
    t = tau * np.arange(n)
    x = np.cos(2 * np.pi * t)
    return cwt_forward(x, ScaleGrid(32, np.array([1.0, 0.9, 1.1]), tau), WAVELET)


def test_tone_magnitude_and_phase():
    field = tone_field()
    w = field.w[0]
    assert abs(w[512]) == pytest.approx(0.5 * WAVELET.hat(1.0), rel=1e-12)
    step = np.angle(w[1:] / w[:-1])
    np.testing.assert_allclose(step, 2 * np.pi / 128, atol=1e-10)


def test_tone_derivative_field():
    field = tone_field()
    np.testing.assert_allclose(field.dw, 2j * np.pi * field.w, rtol=1e-8)
    # finite differences along time agree too
    fd = (field.w[0, 2:] - field.w[0, :-2]) / (2 / 128)
    np.testing.assert_allclose(fd, field.dw[0, 1:-1], rtol=1e-3)


def test_zero_signal():
    field = cwt(SampledSignal(np.zeros(100), 0.01))
    assert not np.any(field.w) and not np.any(field.dw)


@pytest.mark.parametrize("n,seed", [(64, 0), (128, 1), (256, 2)])
def test_fft_matches_direct_sum(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    scales = np.array([3.0, 4.5, 7.0])
    field = cwt_forward(x, ScaleGrid(32, scales, 1.0), WAVELET)
    # enough periodic images that the time-domain kernel has decayed
    ref = direct_cwt(x, scales, 1.0, wraps=max(6, 3072 // n))
    assert np.max(np.abs(field.w - ref)) / np.max(np.abs(ref)) < 1e-8


@given(arrays(float, 64, elements=st.floats(-1e3, 1e3)), arrays(float, 64, elements=st.floats(-1e3, 1e3)),
       st.floats(-10, 10), st.floats(-10, 10))
def test_linearity(x, y, alpha, beta):
    grid = make_scale_grid(64, 1.0, 8)
    fx, fy = cwt_forward(x, grid, WAVELET), cwt_forward(y, grid, WAVELET)
    fz = cwt_forward(alpha * x + beta * y, grid, WAVELET)
    scale = (abs(alpha) * np.abs(x).max() + abs(beta) * np.abs(y).max() + 1) * 64
    assert np.max(np.abs(fz.w - alpha * fx.w - beta * fy.w)) <= 1e-13 * scale


@given(st.floats(-1e4, 1e4))
def test_constant_is_rejected(c):
    field = cwt(SampledSignal(np.full(200, c), 0.01), 16)
    bound = 1e-12 * max(abs(c), 1e-300) * np.sqrt(field.scales)[:, None]
    assert np.all(np.abs(field.w) <= bound)


def test_field_metadata():
    field = cwt(SampledSignal(np.random.default_rng(0).standard_normal(1000), 0.01))
    assert field.n_padded == 2048 and field.n_original == 1000 and field.offset == 524
    assert field.w.shape == (field.scales.size, 2048)


def test_rejects_unpadded_and_aliased():
    with pytest.raises(ValueError):
        cwt_forward(np.zeros(100), make_scale_grid(128, 1.0), WAVELET)
    with pytest.raises(ValueError):
        cwt_forward(np.zeros(64), ScaleGrid(32, np.array([1.0]), 1.0), WAVELET)
