import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from situp.errors import ConfigError, DegenerateBox
from situp.imageproc import Rect
from situp.scale import ScalePool
from situp.tracker import (SitupTracker, TrackerConfig, config_from_mapping, load_config,
                           run_sequence, template_size)

from conftest import fixture_sequence


def texture(seed=0, shape=(200, 260, 3)):
    rng = np.random.default_rng(seed)
    img = gaussian_filter(rng.uniform(0, 255, shape), (2, 2, 0))
    return (img - img.min()) / np.ptp(img) * 255


def test_init_window_and_grid():
    trk = SitupTracker(TrackerConfig(template_cap=100))
    state = trk.init(texture(), Rect(130, 100, 40, 40))
    assert state.window == (100.0, 100.0)
    assert state.template_px == (100, 100)
    assert trk.grid_shape == (25, 25)


def test_template_cap_shrinks_uniformly():
    assert template_size((200, 100), 96, 4) == (96, 48)
    assert template_size((30, 10), 96, 4) == (32, 8)


@pytest.mark.parametrize("box", [Rect(-100, -100, 20, 20), Rect(50, 50, 1, 30)])
def test_degenerate_init(box):
    with pytest.raises(DegenerateBox):
        SitupTracker().init(texture(), box)


def test_step_before_init():
    with pytest.raises(RuntimeError):
        SitupTracker().step(texture())


def test_stationary_self_tracking():
    img = texture()
    box = Rect(130, 100, 40, 40)
    trk = SitupTracker()
    state = trk.init(img, box)
    _, out, diag = trk.step(img)
    ratio = state.window[0] / state.template_px[0]
    assert diag.chosen_factor == 1.0
    assert abs(out.cx - box.cx) <= 4 * ratio and abs(out.cy - box.cy) <= 4 * ratio
    assert (out.w, out.h) == (box.w, box.h)


def test_translation_by_two_cells():
    img = texture(1, (200, 300, 3))
    box = Rect(120, 100, 24, 24)
    cfg = TrackerConfig(pool=ScalePool((1.0,)))
    trk = SitupTracker(cfg)
    state = trk.init(img[:, 8:], box)
    assert state.window[0] == state.template_px[0]
    _, out, _ = trk.step(img[:, :-8])
    assert out.cx == box.cx + 8 and out.cy == box.cy


def test_one_frame_sequence():
    box = Rect(130, 100, 40, 40)
    res = run_sequence([texture()], box)
    assert res.boxes == [box] and res.diagnostics == []


def test_static_fixture_drift():
    seq = fixture_sequence("static")
    res = run_sequence(seq.frames, seq.init_box)
    c0 = np.array([seq.init_box.cx, seq.init_box.cy])
    assert max(np.hypot(*(np.array([b.cx, b.cy]) - c0)) for b in res.boxes) <= 2


def test_deterministic():
    seq = fixture_sequence("static")
    a = run_sequence(seq.frames[:6], seq.init_box)
    b = run_sequence(seq.frames[:6], seq.init_box)
    assert a.boxes == b.boxes
    assert [d.per_scale_apce for d in a.diagnostics] == [d.per_scale_apce for d in b.diagnostics]


def test_frozen_model_with_zero_theta():
    seq = fixture_sequence("static")
    trk = SitupTracker(TrackerConfig(theta=0.0))
    trk.init(seq.frames[0], seq.init_box)
    before = trk.model.xhat.copy()
    trk.step(seq.frames[1])
    np.testing.assert_array_equal(trk.model.xhat, before)


def test_window_tracks_target_and_scale_compounds():
    seq = fixture_sequence("zoom")
    res = run_sequence(seq.frames[:12], seq.init_box)
    trk_w = res.boxes[0].w
    for box, d in zip(res.boxes[1:], res.diagnostics):
        trk_w *= d.chosen_factor
        assert box.w == pytest.approx(trk_w)


def test_unreadable_frame_gives_partial_result():
    from situp.errors import UnreadableFrame

    def bad():
        raise UnreadableFrame("corrupt")

    img = texture()
    res = run_sequence([img, img, bad, img], Rect(130, 100, 40, 40))
    assert not res.complete and len(res.boxes) == 2 and "corrupt" in res.error


def test_config_parsing(tmp_path):
    cfg = config_from_mapping({"lambda": "1e-3", "pool": "0.99,1.0,1.01", "cn": "no",
                               "criterion": "maxresp", "cell": "2"})
    assert cfg.lam == 1e-3 and len(cfg.pool) == 3 and not cfg.features.cn
    assert cfg.features.cell == 2
    path = tmp_path / "c.cfg"
    path.write_text("# comment\ntheta = 0.01\n")
    assert load_config(path).theta == 0.01
    with pytest.raises(ConfigError):
        config_from_mapping({"nonsense": "1"})
    with pytest.raises((ConfigError, ValueError)):
        config_from_mapping({"criterion": "psr"})
