import numpy as np
import pytest

from tvsr.resample import (
    BICUBIC_KEYS,
    CUBIC_BSPLINE,
    bspline_prefilter,
    bspline_weight,
    downsample_lr,
    keys_weight,
    reflect_indices,
    resample,
)


def test_keys_weight_anchor():
    # (a+2)|x|^3 - (a+3)|x|^2 + 1 at x = 0.5, a = -0.5
    a = -0.5
    expected = (a + 2) * 0.5 ** 3 - (a + 3) * 0.5 ** 2 + 1
    assert expected == 0.5625
    assert keys_weight(0.5) == expected
    assert keys_weight(-0.5) == expected


def test_keys_is_interpolating():
    assert keys_weight(0.0) == 1.0
    for n in (-2, -1, 1, 2, 3):
        assert keys_weight(float(n)) == 0.0


@pytest.mark.parametrize("fn", [keys_weight, bspline_weight])
def test_partition_of_unity(fn):
    phases = np.linspace(0.0, 1.0, 1000, endpoint=False)
    total = sum(fn(phases - k) for k in (-1, 0, 1, 2))
    assert np.max(np.abs(total - 1.0)) < 1e-12


@pytest.mark.parametrize("kernel", [BICUBIC_KEYS, CUBIC_BSPLINE])
def test_constant_preserved(kernel):
    img = np.full((16, 12), 0.4)
    out = resample(img, 2.0, kernel)
    assert out.shape == (32, 24)
    assert np.max(np.abs(out - 0.4)) < 1e-12


def test_linear_ramp_preserved_interior():
    ramp = np.tile(np.linspace(0.1, 0.9, 32), (8, 1))
    up = resample(ramp, 2.0, BICUBIC_KEYS)
    cols = np.arange(up.shape[1])
    src = (cols + 0.5) / 2.0 - 0.5
    expected = 0.1 + (0.9 - 0.1) * src / 31.0
    interior = up[3:-3, 4:-4]
    assert np.max(np.abs(interior - expected[4:-4][None, :])) < 1e-12


def test_bspline_interpolates_samples():
    rng = np.random.default_rng(1)
    img = rng.random((13, 17))
    out = resample(img, 1.0, CUBIC_BSPLINE)
    assert np.max(np.abs(out - img)) < 1e-9


def test_keys_identity_at_factor_one():
    rng = np.random.default_rng(2)
    img = rng.random((9, 21))
    assert np.array_equal(resample(img, 1.0, BICUBIC_KEYS), img)


def test_prefilter_against_dense_solve():
    # independent oracle: solve the full tridiagonal system densely
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 8, 31):
        signal = rng.random((n, 4))
        a = np.zeros((n, n))
        for i in range(n):
            a[i, i] = 4.0
            if i > 0:
                a[i, i - 1] += 1.0
            else:
                a[i, i] += 1.0
            if i < n - 1:
                a[i, i + 1] += 1.0
            else:
                a[i, i] += 1.0
        dense = np.linalg.solve(a / 6.0, signal)
        # a 1-wide second axis makes the 2-D prefilter act on one axis only
        one_axis = bspline_prefilter(signal[:, :1])
        assert np.allclose(one_axis, dense[:, :1], atol=1e-10)


def test_resample_errors():
    img = np.zeros((4, 4))
    with pytest.raises(ValueError, match="positive"):
        resample(img, -1.0, BICUBIC_KEYS)
    with pytest.raises(ValueError, match="zero-sized"):
        resample(img, 0.01, BICUBIC_KEYS)


def test_reflect_indices_half_sample():
    idx = np.array([-3, -2, -1, 0, 1, 4, 5, 6, 7])
    assert list(reflect_indices(idx, 5)) == [2, 1, 0, 0, 1, 4, 4, 3, 2]
    assert list(reflect_indices(np.array([-1, 0, 1]), 1)) == [0, 0, 0]


def test_downsample_constant():
    out = downsample_lr(np.full((32, 32), 0.7), 2)
    assert out.shape == (16, 16)
    assert np.max(np.abs(out - 0.7)) < 1e-12


def test_downsample_crops_to_multiple():
    out = downsample_lr(np.full((33, 33), 0.5), 2)
    assert out.shape == (16, 16)


def test_downsample_impulse_taps():
    # derived oracle: Keys kernel at the half-integer sampling phases.
    # Output pixel r taps source rows 2r-1..2r+2 with weights
    # w(1.5), w(0.5), w(-0.5), w(-1.5); the final [0,1] clamp zeroes the
    # negative separable products.
    taps = {7: keys_weight(1.5).item(), 8: keys_weight(-0.5).item()}
    assert taps[7] == -0.0625 and taps[8] == 0.5625
    img = np.zeros((32, 32))
    img[16, 16] = 1.0
    out = downsample_lr(img, 2)
    expected = np.zeros((16, 16))
    for r, wr in taps.items():
        for c, wc in taps.items():
            expected[r, c] = min(max(wr * wc, 0.0), 1.0)
    assert np.array_equal(out, expected)


def test_downsample_too_small():
    with pytest.raises(ValueError, match="too small"):
        downsample_lr(np.zeros((15, 32)), 2)


def test_downsample_scale_one_is_identity():
    rng = np.random.default_rng(4)
    img = rng.random((20, 20))
    assert np.array_equal(downsample_lr(img, 1), img)


def test_resample_deterministic():
    rng = np.random.default_rng(5)
    img = rng.random((25, 30))
    a = resample(img, 1.7, CUBIC_BSPLINE)
    b = resample(img, 1.7, CUBIC_BSPLINE)
    assert np.array_equal(a, b)
