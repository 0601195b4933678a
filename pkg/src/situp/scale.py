"""Exhaustive scale search over a fixed pool of window-size factors.

Each factor ``t`` samples a window of ``t`` times the previous size around
the previous center, resamples it to the template size and runs detection.
The factor whose response map scores best wins: by APCE (the default), or by
the raw peak value (``criterion="maxresp"``) for comparison.
"""
from dataclasses import dataclass, field

import numpy as np

from .dcf import ResponseMap, apce, detect
from .features import build_stack
from .imageproc import Rect, apply_window, cosine_window, sample_window

__all__ = ["ScalePool", "ScaleDecision", "apce", "select_scale", "patch_features",
           "CRITERIA"]

CRITERIA = ("apce", "maxresp")

MIN_WINDOW_PX = 8.0
MAX_WINDOW_FRAMES = 4.0


@dataclass(frozen=True)
class ScalePool:
    factors: tuple = (0.985, 0.99, 0.995, 1.0, 1.005, 1.01, 1.015)

    def __post_init__(self):
        f = tuple(float(v) for v in self.factors)
        object.__setattr__(self, "factors", f)
        if 1.0 not in f:
            raise ValueError("scale pool must contain 1.0")
        if any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError("scale pool must be strictly increasing")
        if any(not 0.5 < v < 2.0 for v in f):
            raise ValueError("scale factors must lie in (0.5, 2.0)")

    @classmethod
    def parse(cls, text):
        return cls(tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip()))

    @property
    def unit_index(self):
        return self.factors.index(1.0)

    def __len__(self):
        return len(self.factors)


@dataclass
class ScaleDecision:
    chosen_factor: float
    chosen_index: int
    per_scale_apce: list
    per_scale_peak: list
    response: ResponseMap
    no_confidence: bool = False
    responses: list = field(default_factory=list, repr=False)


def clamp_window(w, h, frame_shape):
    fh, fw = frame_shape[:2]
    return (min(max(w, MIN_WINDOW_PX), MAX_WINDOW_FRAMES * fw),
            min(max(h, MIN_WINDOW_PX), MAX_WINDOW_FRAMES * fh))


def patch_features(frame, center, window, template_px, feats, table, cos_win):
    """Windowed feature stack of the ``window``-sized region around ``center``."""
    w, h = clamp_window(window[0], window[1], np.shape(frame))
    patch = sample_window(frame, Rect(center[0], center[1], w, h), *template_px)
    return apply_window(build_stack(patch, feats, table), cos_win)


def _pick(scores, factors):
    """Index of the best score; exact ties go to the factor nearest 1.0, then lowest index."""
    best = max(scores)
    tied = [i for i, s in enumerate(scores) if s == best]
    return min(tied, key=lambda i: (abs(factors[i] - 1.0), i))


def select_scale(model, frame, state, pool, feats, table=None, cos_win=None,
                 criterion="apce"):
    """Detect at every pool factor and keep the best-scoring response.

    ``state`` supplies ``center``, ``window`` and ``template_px``. A frame
    where every response is flat keeps factor 1.0 and sets ``no_confidence``.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    if cos_win is None:
        cos_win = cosine_window(*model.shape[::-1])

    responses = []
    for t in pool.factors:
        window = (state.window[0] * t, state.window[1] * t)
        z = patch_features(frame, state.center, window, state.template_px, feats,
                           table, cos_win)
        responses.append(detect(model, z))

    apces = [r.apce for r in responses]
    peaks = [r.peak_value for r in responses]
    flat = all(r.grid.max() == r.grid.min() for r in responses)
    if flat:
        idx = pool.unit_index
    else:
        idx = _pick(apces if criterion == "apce" else peaks, pool.factors)
    return ScaleDecision(pool.factors[idx], idx, apces, peaks, responses[idx],
                         no_confidence=flat, responses=responses)
