import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from situp.dcf import (circulant_rows, decode_displacement, detect, gaussian_labels,
                       interpolate, kernel_hat, label_sigma, linear_kernel_corr,
                       make_response, ridge_regression_oracle, train, update)
from situp.errors import DimensionMismatch
from situp.spectral import dft2

LAM = 3e-4


def textured_stack(rng, h=16, w=16, c=5):
    from scipy.ndimage import gaussian_filter
    return gaussian_filter(rng.standard_normal((h, w, c)), (0.7, 0.7, 0))


def test_labels_peak_at_wrapped_origin():
    y = gaussian_labels(8, 6, 1.5)
    assert y.shape == (6, 8)
    assert y[0, 0] == 1.0 and y.argmax() == 0
    assert y[0, 1] == y[0, 7] and y[1, 0] == y[5, 0]


def test_label_sigma():
    assert label_sigma(4, 9) == pytest.approx(0.6)


def test_kernel_is_additive_over_channels(rng):
    x = dft2(rng.standard_normal((6, 7, 3)))
    z = dft2(rng.standard_normal((6, 7, 3)))
    per = sum(linear_kernel_corr(x[..., c], z[..., c]) for c in range(3))
    np.testing.assert_allclose(linear_kernel_corr(x, z), per)
    np.testing.assert_allclose(kernel_hat(x, z), per / x.size)


def test_kernel_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        linear_kernel_corr(np.zeros((4, 4, 2)), np.zeros((4, 4, 3)))


def test_train_is_linear_in_labels(rng):
    x = rng.standard_normal((8, 8, 2))
    y1, y2 = rng.standard_normal((2, 8, 8))
    a = train(x, 2 * y1 - y2, LAM).alphahat
    np.testing.assert_allclose(a, 2 * train(x, y1, LAM).alphahat - train(x, y2, LAM).alphahat,
                               atol=1e-8 * np.abs(a).max())


@pytest.mark.parametrize("n", [4, 8, 16])
def test_dual_matches_primal(n, rng):
    # the dual path divides the kernel by n, so its lambda is the primal one over n
    for _ in range(50):
        x, y, z = rng.standard_normal((3, n))
        lam = rng.uniform(0.01, 1.0)
        w = ridge_regression_oracle(x, y, lam)
        dual = detect(train(x[None], y[None], lam / n), z[None]).grid[0]
        np.testing.assert_allclose(dual, circulant_rows(z) @ w, atol=1e-6)


def test_circulant_rows():
    np.testing.assert_array_equal(circulant_rows([1, 2, 3]), [[1, 2, 3], [2, 3, 1], [3, 1, 2]])


def test_self_detection_peaks_at_origin(rng):
    x = textured_stack(rng)
    y = gaussian_labels(16, 16, 1.2)
    r = detect(train(x, y, LAM), x)
    assert r.peak_pos == (0, 0)
    assert 0.7 <= r.peak_value <= 1.0


def test_cyclic_shifts_detected_exactly(rng):
    x = textured_stack(rng, 8, 8, 4)
    model = train(x, gaussian_labels(8, 8, 0.8), LAM)
    for dr in range(8):
        for dc in range(8):
            r = detect(model, np.roll(x, (dr, dc), axis=(0, 1)))
            assert r.peak_pos == (dr, dc)


def test_zero_input_gives_flat_response(rng):
    model = train(textured_stack(rng, 8, 8, 2), gaussian_labels(8, 8, 1.0), LAM)
    r = detect(model, np.zeros((8, 8, 2)))
    assert r.peak_pos == (0, 0) and r.apce == 0.0


def test_detect_shape_mismatch(rng):
    model = train(rng.standard_normal((8, 8, 2)), gaussian_labels(8, 8, 1.0), LAM)
    with pytest.raises(DimensionMismatch):
        detect(model, np.zeros((8, 8, 3)))


@pytest.mark.parametrize("pos,expected", [((0, 0), (0, 0)), ((3, 5), (3, -3)),
                                          ((4, 4), (4, 4)), ((7, 1), (-1, 1))])
def test_decode_displacement(pos, expected):
    assert decode_displacement(pos, 8, 8) == expected


def test_make_response_row_major_tie():
    grid = np.zeros((3, 3))
    grid[1, 2] = grid[2, 0] = 1.0
    assert make_response(grid).peak_pos == (1, 2)


def test_update_extremes(rng):
    y = gaussian_labels(8, 8, 1.0)
    x0, x1 = rng.standard_normal((2, 8, 8, 2))
    m0 = train(x0, y, LAM, theta=0.0)
    np.testing.assert_array_equal(update(m0, x1, y).xhat, m0.xhat)
    m1 = train(x0, y, LAM, theta=1.0)
    np.testing.assert_allclose(update(m1, x1, y).alphahat, train(x1, y, LAM).alphahat)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(1, 5))
def test_interpolation_telescopes(theta, k):
    rng = np.random.default_rng(k)
    y = gaussian_labels(6, 6, 1.0)
    model = train(rng.standard_normal((6, 6, 1)), y, LAM, theta)
    new = train(rng.standard_normal((6, 6, 1)), y, LAM)
    out = model
    for _ in range(k):
        out = interpolate(out, new)
    w = (1 - theta) ** k
    np.testing.assert_allclose(out.xhat, w * model.xhat + (1 - w) * new.xhat, atol=1e-9)


def test_heavy_regularization_shrinks_response(rng):
    x = textured_stack(rng, 8, 8, 2)
    r = detect(train(x, gaussian_labels(8, 8, 1.0), 1e6), x)
    assert abs(r.peak_value) < 1e-6
