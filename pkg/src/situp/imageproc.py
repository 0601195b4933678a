"""Patch extraction, bilinear resampling and cosine windows.

Images are float or uint8 numpy arrays shaped ``(H, W)`` or ``(H, W, 3)``
with intensities in [0, 255]. Pixel centers sit at integer coordinates, so a
box whose 0-indexed left column is ``x0`` and width is ``w`` has center
``x0 + (w - 1) / 2``. Out-of-frame samples replicate the nearest edge pixel.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box in center form (0-indexed pixel coordinates)."""
    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"Rect extent must be positive, got {self.w}x{self.h}")

    @classmethod
    def from_corner(cls, x, y, w, h):
        """Build from OTB corner form (1-indexed top-left corner)."""
        return cls(x - 1 + (w - 1) / 2, y - 1 + (h - 1) / 2, w, h)

    def to_corner(self):
        """Return the OTB corner tuple ``(x, y, w, h)``, 1-indexed."""
        return (self.cx - (self.w - 1) / 2 + 1, self.cy - (self.h - 1) / 2 + 1,
                self.w, self.h)

    def scaled(self, factor):
        return Rect(self.cx, self.cy, self.w * factor, self.h * factor)


def _as_float(img):
    return np.asarray(img, dtype=np.float64)


def extract_patch(img, region):
    """Pixel-aligned crop of rounded size centered on ``region``."""
    img = np.asarray(img)
    pw = max(int(round(region.w)), 1)
    ph = max(int(round(region.h)), 1)
    x0 = int(np.floor(region.cx - (pw - 1) / 2 + 0.5))
    y0 = int(np.floor(region.cy - (ph - 1) / 2 + 0.5))
    xs = np.clip(np.arange(x0, x0 + pw), 0, img.shape[1] - 1)
    ys = np.clip(np.arange(y0, y0 + ph), 0, img.shape[0] - 1)
    return img[ys[:, None], xs[None, :]]


def _bilinear_taps(coords, size):
    """Integer taps and weights for sampling positions clamped to [0, size-1]."""
    coords = np.clip(coords, 0.0, size - 1)
    lo = np.floor(coords).astype(np.intp)
    hi = np.minimum(lo + 1, size - 1)
    frac = coords - lo
    return lo, hi, frac


def sample_grid(img, ys, xs):
    """Separable bilinear sampling of ``img`` at the grid ``ys x xs``."""
    img = np.asarray(img)
    y0, y1, fy = _bilinear_taps(ys, img.shape[0])
    x0, x1, fx = _bilinear_taps(xs, img.shape[1])
    tail = (1,) * (img.ndim - 1)
    fy = fy.reshape(-1, *tail)
    fx = fx.reshape(1, -1, *tail[1:])
    # gather at output resolution before converting, the frame can be large
    top = _as_float(img[y0[:, None], np.concatenate([x0, x1])[None, :]])
    bot = _as_float(img[y1[:, None], np.concatenate([x0, x1])[None, :]])
    rows = top * (1 - fy) + bot * fy
    n = x0.size
    return rows[:, :n] * (1 - fx) + rows[:, n:] * fx


def resize_bilinear(patch, out_w, out_h):
    """Bilinear resize with corner-aligned sample mapping.

    Output sample ``i`` reads input coordinate ``i * (n_in - 1) / (n_out - 1)``
    so the corner pixels of input and output coincide.
    """
    patch = _as_float(patch)
    in_h, in_w = patch.shape[:2]
    xs = np.linspace(0.0, in_w - 1, out_w) if out_w > 1 else np.array([(in_w - 1) / 2])
    ys = np.linspace(0.0, in_h - 1, out_h) if out_h > 1 else np.array([(in_h - 1) / 2])
    return sample_grid(patch, ys, xs)


def sample_window(img, region, out_w, out_h):
    """Extract ``region`` and resample it to ``out_w x out_h`` in one pass.

    Sample ``i`` maps to source coordinate
    ``cx - w/2 + (i + 0.5) * w / out_w`` (pixel-center convention), which
    keeps fractional window sizes exact instead of rounding the crop first.
    """
    xs = region.cx - region.w / 2 + (np.arange(out_w) + 0.5) * (region.w / out_w)
    ys = region.cy - region.h / 2 + (np.arange(out_h) + 0.5) * (region.h / out_h)
    return sample_grid(img, ys, xs)


def cosine_window(w, h):
    """Separable Hann window, shape ``(h, w)``, zero at the borders."""
    return np.outer(np.hanning(h), np.hanning(w))


def apply_window(feat, win):
    """Multiply every channel of ``feat`` (``(H, W)`` or ``(H, W, C)``) by ``win``."""
    feat = np.asarray(feat, dtype=np.float64)
    if feat.shape[:2] != win.shape:
        raise DimensionMismatch(f"feature grid {feat.shape[:2]} vs window {win.shape}")
    if feat.ndim == 3:
        return feat * win[:, :, None]
    return feat * win
