import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sstdecomp.cwt import cwt, cwt_forward, make_scale_grid
from sstdecomp.ridge import extract_k_ridges, extract_ridge, functional, if_from_ridge
from sstdecomp.sst import sst
from sstdecomp.synth import gen_s1, gen_s2, sample
from sstdecomp.wavelet import MotherWavelet


def log_data(mag):
    return np.log(np.maximum(mag / mag.sum(), 1e-16))


def enumerate_best(mag, lam):
    n_bins, n_t = mag.shape
    d = log_data(mag)
    # product() yields paths in lexicographic order, so argmax keeps the lowest on ties
    paths = np.array(list(itertools.product(range(n_bins), repeat=n_t)), dtype=np.int64)
    vals = d[paths, np.arange(n_t)].sum(axis=1) - lam * np.sum(np.diff(paths, axis=1) ** 2, axis=1)
    best = int(np.argmax(vals))
    return paths[best], float(vals[best])


def naive_dp(mag, lam):
    # textbook O(n_t n_bins^2) recursion, independent of the envelope trick
    d = log_data(mag)
    n_bins, n_t = d.shape
    c = np.arange(n_bins)
    cost = (c[:, None] - c[None, :]) ** 2 * lam
    val = d[:, 0].copy()
    back = np.zeros((n_bins, n_t), dtype=int)
    for m in range(1, n_t):
        cand = val[None, :] - cost
        back[:, m] = np.argmax(cand, axis=1)
        val = cand[c, back[:, m]] + d[:, m]
    path = np.empty(n_t, dtype=int)
    path[-1] = int(np.argmax(val))
    for m in range(n_t - 1, 0, -1):
        path[m - 1] = back[path[m], m]
    return path, float(val.max())


def test_lambda_zero_is_columnwise_argmax(rng):
    mag = rng.random((20, 30))
    r = extract_ridge(mag, 0.0)
    np.testing.assert_array_equal(r.bins - 1, np.argmax(mag, axis=0))


@given(st.floats(0, 1e4))
def test_dominant_row_gives_constant_ridge(lam):
    mag = np.random.default_rng(0).random((64, 16)) * 0.1
    mag[37] += 1.0
    path, _ = naive_dp(mag, lam)
    r = extract_ridge(mag, lam)
    np.testing.assert_array_equal(r.bins - 1, path)
    assert np.all(r.bins == 38)


def test_random_6x8_matches_enumeration():
    for seed in range(5):
        mag = np.random.default_rng(seed).random((6, 8))
        path, best = enumerate_best(mag, 0.5)
        r = extract_ridge(mag, 0.5)
        np.testing.assert_array_equal(r.bins - 1, path)
        assert r.score == pytest.approx(best, rel=1e-12)


@given(st.integers(1, 8), st.integers(1, 10), st.floats(0, 5), st.integers(0, 2 ** 32 - 1))
def test_small_grids_optimal(n_bins, n_t, lam, seed):
    mag = np.random.default_rng(seed).random((n_bins, n_t))
    if n_bins ** n_t <= 50_000:
        path, best = enumerate_best(mag, lam)
    else:
        path, best = naive_dp(mag, lam)
    r = extract_ridge(mag, lam)
    assert functional(mag, r.bins - 1, lam) == pytest.approx(best, rel=1e-12, abs=1e-12)
    np.testing.assert_array_equal(r.bins - 1, path)


def test_ties_prefer_low_bins():
    r = extract_ridge(np.ones((5, 7)), 1.0)
    assert np.all(r.bins == 1)


def test_sparse_cells_use_floor():
    mag = np.zeros((4, 5))
    mag[2, :] = 1.0
    mag[0, 2] = 0.5
    r = extract_ridge(mag, 0.0)
    assert np.all(r.bins - 1 == [2, 2, 2, 2, 2])
    assert np.isfinite(r.score)


def test_errors():
    with pytest.raises(ValueError):
        extract_ridge(np.zeros((3, 3)), 1.0)
    with pytest.raises(ValueError):
        extract_ridge(np.ones((3, 3)), -1.0)
    with pytest.raises(ValueError):
        extract_k_ridges(np.ones((3, 3)), 0)


def test_penalty_monotone_in_lambda():
    for seed in range(5):
        mag = np.random.default_rng(seed).random((30, 40))
        jumps = [np.sum(np.diff(extract_ridge(mag, lam).bins) ** 2.0)
                 for lam in (0.0, 0.01, 0.1, 0.5, 1.0, 5.0, 50.0)]
        assert all(a >= b for a, b in zip(jumps, jumps[1:]))


@given(st.floats(1e-6, 1e6))
def test_scale_invariance(c):
    mag = np.random.default_rng(1).random((12, 15))
    np.testing.assert_array_equal(extract_ridge(mag, 0.3).bins, extract_ridge(c * mag, 0.3).bins)


def test_window_limits_jumps():
    mag = np.random.default_rng(2).random((40, 50))
    r = extract_ridge(mag, 0.0, window=2)
    assert np.max(np.abs(np.diff(r.bins))) <= 2
    np.testing.assert_array_equal(extract_ridge(mag, 0.2, window=40).bins, extract_ridge(mag, 0.2).bins)


def test_k1_equals_single():
    mag = np.random.default_rng(3).random((25, 30))
    (r,) = extract_k_ridges(mag, 1, 0.5)
    np.testing.assert_array_equal(r.bins, extract_ridge(mag, 0.5).bins)


def test_too_few_ridges_warn():
    mag = np.zeros((20, 10))
    mag[10] = 1.0
    with pytest.warns(RuntimeWarning):
        ridges = extract_k_ridges(mag, 3, 1.0)
    assert len(ridges) == 1


def test_min_bin_excludes_low_rows():
    mag = np.ones((20, 10))
    mag[2] = 5.0
    (r,) = extract_k_ridges(mag, 1, 1.0, min_bin=6)
    assert np.all(r.bins >= 6)
    with pytest.raises(ValueError):
        extract_k_ridges(mag, 1, 1.0, min_bin=0)


def squeezed(y):
    field = cwt(y)
    return field, sst(field)


def test_s1_two_constant_ridges():
    s11, s12 = gen_s1()
    field, sq = squeezed(sample(lambda t: s11(t) + s12(t)))
    ridges = extract_k_ridges(sq, 2)
    # the bump spans about three periods in time, so mirror edges reach ~1 s inside
    interior = slice(field.offset + 100, field.offset + 900)
    for ridge, xi in zip(ridges, (1.0, np.pi)):
        nearest = int(np.rint(xi / sq.freq.delta_xi))
        assert np.all(np.abs(ridge.bins[interior] - nearest) <= 1)
    assert ridges[0].bins.mean() < ridges[1].bins.mean()


def test_s2_ridges_track_instantaneous_frequency():
    s21, s22 = gen_s2()
    y = sample(lambda t: s21(t) + s22(t))
    field, sq = squeezed(y)
    r1, r2 = extract_k_ridges(sq, 2)
    t = y.times
    keep = (t >= 0.5) & (t <= 9.5)
    sl = slice(field.offset, field.offset + len(y))
    err1 = np.abs(if_from_ridge(r1, sq.freq)[sl] - s21.inst_freq(t))[keep]
    err2 = np.abs(r2.bins[sl] - s22.inst_freq(t) / sq.freq.delta_xi)[keep]
    assert err1.max() <= 2 * sq.freq.delta_xi
    assert err2.max() <= 2


def test_if_from_ridge():
    y = sample(lambda t: np.cos(2 * np.pi * t), 0.01, 512)
    field, sq = squeezed(y)
    assert field.n_padded * 0.01 == pytest.approx(10.24)
    r = extract_ridge(sq)
    inst = if_from_ridge(r, sq.freq)[field.offset + 100:field.offset + 412]
    assert np.all(np.abs(inst - 1.0) <= 1 / 10.24)
    const = type(r)(np.full(1024, 7), 1.0, 0.0)
    np.testing.assert_allclose(if_from_ridge(const, sq.freq), 7 / 10.24)
