import numpy as np
import pytest
from hypothesis import given, strategies as st

from sstdecomp.cwt import ScaleGrid, cwt, cwt_forward, make_scale_grid
from sstdecomp.reconstruct import REAL_SIGNAL_GAIN
from sstdecomp.sst import FrequencyGrid, default_threshold, reassignment, sst, synchrosqueeze
from sstdecomp.synth import SampledSignal, gen_s1, sample
from sstdecomp.wavelet import MotherWavelet

WAVELET = MotherWavelet()


def periodic_tone(amp=1.0, xi0=1.0, tau=1 / 128, n=1024):
    # xi0 on the DFT grid of an unpadded record, so the transform is exact
    t = tau * np.arange(n)
    return cwt_forward(amp * np.cos(2 * np.pi * xi0 * t), make_scale_grid(n, tau, 32), WAVELET)


def test_frequency_grid():
    field = cwt(SampledSignal(np.ones(1000), 0.01))
    freq = FrequencyGrid.for_field(field)
    assert freq.delta_xi == pytest.approx(1 / 20.48)
    assert freq.bins[0] == pytest.approx(1 / (2048 * 0.01))
    assert freq.bins[-1] < 1 / (2 * 0.01)
    assert freq.n_bins == 1023


def test_tone_reassignment_exact():
    field = periodic_tone()
    omega = reassignment(field)
    live = np.abs(field.w) >= 1e-6 * np.abs(field.w).max()
    assert live.any()
    np.testing.assert_allclose(omega[live], 1.0, atol=1e-8)


def test_zero_cells_are_undefined():
    field = periodic_tone()
    omega = reassignment(field)
    assert np.all(np.isnan(omega[field.w == 0]))
    zero = cwt_forward(np.zeros(64), make_scale_grid(64, 1.0), WAVELET)
    assert np.all(np.isnan(reassignment(zero)))


def test_two_tones_reassign_to_their_own_bands():
    s11, s12 = gen_s1()
    y = sample(lambda t: s11(t) + s12(t))
    field = cwt(y)
    omega = reassignment(field)
    freq = FrequencyGrid.for_field(field)
    interior = np.arange(field.offset + 100, field.offset + 900)
    for xi in (1.0, np.pi):
        row = np.argmin(np.abs(field.scales - 1 / xi))
        assert np.max(np.abs(omega[row, interior] - xi)) < freq.delta_xi


def test_threshold_zero_and_deterministic():
    zero = cwt(SampledSignal(np.zeros(100), 0.01))
    assert default_threshold(zero) == 0.0
    field = cwt(SampledSignal(np.random.default_rng(0).standard_normal(500), 0.01))
    assert default_threshold(field) == default_threshold(field)
    assert default_threshold(field, 2.0) == pytest.approx(2 * default_threshold(field))


def test_threshold_near_noise_percentile():
    n, tau = 1024, 0.01
    grid = make_scale_grid(n, tau, 32, WAVELET)
    rng = np.random.default_rng(7)
    gammas, mags = [], []
    for _ in range(100):
        field = cwt_forward(rng.standard_normal(n), grid, WAVELET)
        gammas.append(default_threshold(field))
        mags.append(np.abs(field.w[:32]).ravel())
    p99 = np.percentile(np.concatenate(mags), 99)
    ratio = np.mean(gammas) / p99
    assert 0.5 < ratio < 2.0


def test_zero_field_squeezes_to_zero():
    zero = cwt_forward(np.zeros(64), make_scale_grid(64, 1.0), WAVELET)
    assert not np.any(synchrosqueeze(zero, reassignment(zero), 0.0).s)


def test_tone_concentrates_in_one_bin():
    field = periodic_tone()
    sq = synchrosqueeze(field, reassignment(field), 0.0)
    mag = np.abs(sq.s)
    j0 = int(round(1.0 / sq.freq.delta_xi)) - 1
    assert np.all(mag[j0] > 0)
    others = np.delete(mag, j0, axis=0)
    assert others.max() < 1e-6 * mag[j0].max()


def test_squeezed_band_reconstructs_tone():
    y = sample(lambda t: 2.5 * np.cos(2 * np.pi * t))
    field = cwt(y)
    sq = synchrosqueeze(field, reassignment(field), 0.0)
    band = (sq.freq.bins >= 0.7) & (sq.freq.bins <= 1.3)
    rec = REAL_SIGNAL_GAIN / WAVELET.r_psi * sq.s[band].sum(axis=0)
    rec = rec.real[field.offset:field.offset + 1000]
    err = np.abs(rec - y.values)[100:900].max()
    assert err < 0.01 * 2.5


def test_column_mass_is_conserved():
    y = SampledSignal(np.random.default_rng(3).standard_normal(300), 0.01)
    field = cwt(y, 16)
    omega = reassignment(field)
    gamma = default_threshold(field)
    sq = synchrosqueeze(field, omega, gamma)
    j = np.rint(np.where(np.isfinite(omega), omega, -1) / sq.freq.delta_xi)
    keep = np.isfinite(omega) & (np.abs(field.w) >= gamma) & (j >= 1) & (j <= sq.freq.n_bins)
    contrib = field.w * (field.grid.weights * field.scales ** -1.5)[:, None]
    expected = np.where(keep, contrib, 0).sum(axis=0)
    np.testing.assert_allclose(sq.s.sum(axis=0), expected, rtol=1e-12, atol=1e-14)


@given(st.floats(0, 2), st.floats(0, 2))
def test_raising_gamma_never_adds_cells(g1, g2):
    lo, hi = sorted((g1, g2))
    field = _noisy_field()
    omega = reassignment(field)
    s_lo = synchrosqueeze(field, omega, lo).s
    s_hi = synchrosqueeze(field, omega, hi).s
    assert not np.any((s_hi != 0) & (s_lo == 0))


_FIELD = {}


def _noisy_field():
    if "f" not in _FIELD:
        rng = np.random.default_rng(4)
        t = 0.01 * np.arange(1, 401)
        _FIELD["f"] = cwt(SampledSignal(np.cos(2 * np.pi * 3 * t) + rng.standard_normal(400), 0.01), 16)
    return _FIELD["f"]


def test_unit_tone_sharpness():
    # a tone periodic in the analysis window; a mirror-padded record adds
    # wrap-around content at large scales that is unrelated to squeezing
    field = periodic_tone(xi0=1.0)
    sq = sst(field, gamma=0.0)
    mag = np.abs(sq.s)
    j0 = int(round(1.0 / sq.freq.delta_xi)) - 1
    cols = np.arange(100, 924)
    near = mag[j0 - 1:j0 + 2][:, cols].sum(axis=0)
    assert np.all(near >= 0.99 * mag[:, cols].sum(axis=0))


def test_padded_tone_mass_near_its_frequency():
    y = sample(lambda t: np.cos(2 * np.pi * t))
    field = cwt(y)
    sq = sst(field, gamma=0.0)
    mag = np.abs(sq.s)[:, field.offset + 100:field.offset + 900]
    band = np.abs(sq.freq.bins - 1.0) <= 2 * sq.freq.delta_xi
    assert np.all(mag[band].sum(axis=0) >= 0.9 * mag.sum(axis=0))


def test_shape_mismatch():
    field = periodic_tone()
    with pytest.raises(ValueError):
        synchrosqueeze(field, np.zeros((2, 2)), 0.0)
