"""Single-target tracker with APCE-driven scale search.

``SitupTracker.init`` trains the filter on the first frame. Each ``step``
searches the scale pool around the previous center, reads the translation
off the winning response map, rescales window and target by the chosen
factor and interpolates the model toward a filter trained on the new patch.
"""
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .dcf import (decode_displacement, detect, gaussian_labels, label_sigma, train,
                  update)
from .errors import ConfigError, DegenerateBox, UnreadableFrame
from .features import FeatureConfig, default_color_table
from .fileio import read_keyvalue
from .imageproc import Rect, cosine_window
from .scale import CRITERIA, ScalePool, patch_features, select_scale

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrackerConfig:
    lam: float = 3e-4
    theta: float = 0.004
    padding: float = 1.5
    sigma_factor: float = 0.1
    cell: int = 4
    pool: ScalePool = field(default_factory=ScalePool)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    template_cap: int = 96
    criterion: str = "apce"
    # Re-center with a factor-1.0 detection before the scale search.
    two_pass: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ConfigError("lambda must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError("theta must lie in [0, 1]")
        if self.criterion not in CRITERIA:
            raise ConfigError(f"criterion must be one of {CRITERIA}")
        if self.features.cell != self.cell:
            object.__setattr__(self, "features", replace(self.features, cell=self.cell))


_CONFIG_KEYS = {
    "lambda": ("lam", float),
    "lam": ("lam", float),
    "theta": ("theta", float),
    "padding": ("padding", float),
    "sigma_factor": ("sigma_factor", float),
    "cell": ("cell", int),
    "template_cap": ("template_cap", int),
    "criterion": ("criterion", str),
    "two_pass": ("two_pass", "bool"),
    "pool": ("pool", ScalePool.parse),
    "hog": ("hog", "bool"),
    "cn": ("cn", "bool"),
    "gray": ("gray", "bool"),
}


def _parse_bool(value):
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def config_from_mapping(values, base=None):
    """Build a TrackerConfig from string values keyed as in the config file."""
    base = base or TrackerConfig()
    top, feats = {}, {}
    for key, value in values.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        name, conv = _CONFIG_KEYS[key]
        try:
            parsed = _parse_bool(value) if conv == "bool" else conv(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
        (feats if name in ("hog", "cn", "gray") else top)[name] = parsed
    features = replace(base.features, **feats)
    if "cell" in top:
        features = replace(features, cell=top["cell"])
    return replace(base, features=features, **top)


def load_config(path, base=None):
    return config_from_mapping(read_keyvalue(path), base)


@dataclass(frozen=True)
class TrackState:
    center: tuple       # (cx, cy), 0-indexed pixels
    window: tuple       # (w, h) search window in pixels
    target: tuple       # (w, h) reported box size in pixels
    template_px: tuple  # (w, h) fixed resampled patch size
    frame_index: int

    @property
    def box(self):
        return Rect(self.center[0], self.center[1], *self.target)


@dataclass
class FrameDiagnostics:
    frame_index: int
    chosen_factor: float
    chosen_index: int
    per_scale_apce: list
    per_scale_peak: list
    peak_value: float
    no_confidence: bool
    step_seconds: float = 0.0


def template_size(window, cap, cell):
    """Uniformly shrink ``window`` so its longest side is at most ``cap``.

    Each side is rounded to a whole number of cells, with at least two cells.
    """
    scale = min(1.0, cap / max(window))
    return tuple(max(2 * cell, int(round(s * scale / cell)) * cell) for s in window)


def _intersects(box, frame_shape):
    fh, fw = frame_shape[:2]
    return (box.cx + box.w / 2 > -0.5 and box.cx - box.w / 2 < fw - 0.5
            and box.cy + box.h / 2 > -0.5 and box.cy - box.h / 2 < fh - 0.5)


class SitupTracker:
    """Stateful tracker for one sequence; call ``init`` once, then ``step``."""

    def __init__(self, cfg=None, table="default"):
        self.cfg = cfg or TrackerConfig()
        self.table = default_color_table() if table == "default" else table
        self.state = None
        self.model = None

    def init(self, frame, box):
        cfg = self.cfg
        frame = np.asarray(frame)
        if box.w < 2 or box.h < 2 or not _intersects(box, frame.shape):
            raise DegenerateBox(f"cannot initialize on {box} in frame {frame.shape[:2]}")
        grow = 1 + cfg.padding
        window = (box.w * grow, box.h * grow)
        template_px = template_size(window, cfg.template_cap, cfg.cell)
        grid_w, grid_h = template_px[0] // cfg.cell, template_px[1] // cfg.cell

        cells_w = box.w * template_px[0] / window[0] / cfg.cell
        cells_h = box.h * template_px[1] / window[1] / cfg.cell
        self.sigma = label_sigma(cells_w, cells_h, cfg.sigma_factor)
        self.labels = gaussian_labels(grid_w, grid_h, self.sigma)
        self.cos_win = cosine_window(grid_w, grid_h)

        self.state = TrackState((box.cx, box.cy), window, (box.w, box.h), template_px, 0)
        x = self._features(frame, self.state.center, window)
        self.model = train(x, self.labels, cfg.lam, cfg.theta)
        return self.state

    @property
    def grid_shape(self):
        return self.labels.shape

    def _features(self, frame, center, window):
        return patch_features(frame, center, window, self.state.template_px,
                              self.cfg.features, self.table, self.cos_win)

    def _shift(self, center, window, factor, peak_pos):
        """Move ``center`` by the response peak, converting cells to pixels."""
        gh, gw = self.grid_shape
        dy, dx = decode_displacement(peak_pos, gw, gh)
        tw, th = self.state.template_px
        step_x = self.cfg.cell * factor * window[0] / tw
        step_y = self.cfg.cell * factor * window[1] / th
        return (center[0] + dx * step_x, center[1] + dy * step_y)

    def step(self, frame):
        """Track one frame. Returns ``(state, box, diagnostics)``."""
        if self.state is None:
            raise RuntimeError("init must be called before step")
        tic = time.perf_counter()
        cfg = self.cfg
        state = self.state
        frame = np.asarray(frame)

        if cfg.two_pass:
            z = self._features(frame, state.center, state.window)
            pre = detect(self.model, z)
            state = replace(state, center=self._shift(state.center, state.window,
                                                      1.0, pre.peak_pos))

        decision = select_scale(self.model, frame, state, cfg.pool, cfg.features,
                                self.table, self.cos_win, cfg.criterion)
        t = decision.chosen_factor
        center = self._shift(state.center, state.window, t, decision.response.peak_pos)
        window = (state.window[0] * t, state.window[1] * t)
        target = (state.target[0] * t, state.target[1] * t)

        x_new = self._features(frame, center, window)
        self.model = update(self.model, x_new, self.labels)
        self.state = TrackState(center, window, target, state.template_px,
                                state.frame_index + 1)
        diag = FrameDiagnostics(self.state.frame_index, t, decision.chosen_index,
                                decision.per_scale_apce, decision.per_scale_peak,
                                decision.response.peak_value, decision.no_confidence,
                                time.perf_counter() - tic)
        return self.state, self.state.box, diag


@dataclass
class TrackResult:
    boxes: list                      # Rect per frame, center form
    diagnostics: list                # FrameDiagnostics per stepped frame
    complete: bool = True
    error: str = ""

    @property
    def step_seconds(self):
        return sum(d.step_seconds for d in self.diagnostics)

    @property
    def fps(self):
        s = self.step_seconds
        return len(self.diagnostics) / s if s > 0 else float("nan")


def run_sequence(frames, init_box, cfg=None, table="default"):
    """One-pass run: initialize on the first frame, step through the rest.

    ``frames`` may yield arrays or zero-argument callables returning arrays
    (lazy loading). An unreadable frame ends the run with ``complete=False``
    and the boxes produced so far.
    """
    tracker = SitupTracker(cfg, table)
    boxes, diags = [], []
    for i, frame in enumerate(frames):
        try:
            img = frame() if callable(frame) else frame
        except UnreadableFrame as exc:
            log.error("frame %d unreadable: %s", i, exc)
            return TrackResult(boxes, diags, complete=False, error=str(exc))
        if i == 0:
            tracker.init(img, init_box)
            boxes.append(init_box)
            continue
        _, box, diag = tracker.step(img)
        boxes.append(box)
        diags.append(diag)
    return TrackResult(boxes, diags)
