import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from situp.dcf import apce, gaussian_labels, train
from situp.features import FeatureConfig
from situp.imageproc import cosine_window
from situp.scale import ScalePool, _pick, clamp_window, select_scale
from situp.tracker import TrackState


def apce_loop(f):
    vals = [float(v) for v in np.ravel(f)]
    hi, lo = max(vals), min(vals)
    if hi == lo:
        return 0.0
    return (hi - lo) ** 2 / (sum((v - lo) ** 2 for v in vals) / len(vals))


@pytest.mark.parametrize("shape", [(1, 2), (5, 5), (8, 13)])
def test_one_hot_scores_grid_size(shape):
    f = np.zeros(shape)
    f[0, 1] = 1.0
    assert apce(f) == pytest.approx(f.size, rel=1e-12)


def test_flat_scores_zero():
    assert apce(np.full((4, 4), 3.3)) == 0.0


@given(arrays(np.float64, (6, 7), elements=st.floats(-1e3, 1e3, allow_subnormal=False)
              .filter(lambda v: v == 0 or abs(v) > 1e-6)))
def test_matches_scalar_loop(f):
    assert apce(f) == pytest.approx(apce_loop(f), rel=1e-12, abs=1e-12)


@given(arrays(np.int64, (5, 5), elements=st.integers(-1000, 1000)),
       st.integers(-10 ** 6, 10 ** 6), st.integers(-8, 8))
def test_exact_shift_and_dyadic_scale_invariance(f, shift, e):
    f = f.astype(np.float64)
    assert apce(f + shift) == apce(f)
    assert apce(f * 2.0 ** e) == apce(f)


def test_sharper_peak_scores_higher():
    y = gaussian_labels(16, 16, 1.0)
    assert apce(y) > apce(gaussian_labels(16, 16, 3.0))


def test_tie_rule():
    f = (0.98, 0.99, 1.0, 1.01, 1.02)
    assert _pick([1, 5, 2, 5, 0], f) == 1
    assert _pick([5, 0, 0, 0, 5], f) == 0
    assert _pick([5, 5, 5, 5, 5], f) == 2


def test_pool_validation():
    assert ScalePool().unit_index == 3 and len(ScalePool()) == 7
    assert ScalePool.parse("0.99, 1.0,1.01").factors == (0.99, 1.0, 1.01)
    for bad in ((0.99, 1.01), (1.0, 0.99), (1.0, 2.5)):
        with pytest.raises(ValueError):
            ScalePool(bad)


def test_clamp_window():
    assert clamp_window(2, 3000, (100, 200)) == (8.0, 400.0)


def _setup(rng):
    from scipy.ndimage import gaussian_filter
    frame = gaussian_filter(rng.uniform(0, 255, (120, 160)), 1.5)
    state = TrackState((80.0, 60.0), (60.0, 60.0), (24.0, 24.0), (48, 48), 0)
    feats = FeatureConfig(cn=False)
    from situp.scale import patch_features
    cos = cosine_window(12, 12)
    x = patch_features(frame, state.center, state.window, state.template_px, feats, None, cos)
    return frame, state, feats, train(x, gaussian_labels(12, 12, 0.6), 3e-4)


def test_singleton_pool_always_unit(rng):
    frame, state, feats, model = _setup(rng)
    d = select_scale(model, frame, state, ScalePool((1.0,)), feats)
    assert d.chosen_factor == 1.0 and len(d.per_scale_apce) == 1


def test_static_frame_keeps_scale(rng):
    frame, state, feats, model = _setup(rng)
    for crit in ("apce", "maxresp"):
        d = select_scale(model, frame, state, ScalePool(), feats, criterion=crit)
        assert d.chosen_factor == 1.0
        assert len(d.responses) == 7 and not d.no_confidence


def test_flat_frame_sets_no_confidence(rng):
    _, state, feats, model = _setup(rng)
    d = select_scale(model, np.full((120, 160), 127.5), state, ScalePool(), feats)
    assert d.no_confidence and d.chosen_factor == 1.0


def test_unknown_criterion(rng):
    frame, state, feats, model = _setup(rng)
    with pytest.raises(ValueError):
        select_scale(model, frame, state, ScalePool(), feats, criterion="psr")
