"""Patch features: 31-channel HoG, 11-channel color names and grayscale.

All features are produced on the same cell grid, ``floor(H / cell) x
floor(W / cell)``, and concatenated along the last axis in the order
``[HoG 31 | CN 11 | gray 1]``.
"""
import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import GrayscaleInput, PatchTooSmall

log = logging.getLogger(__name__)

HOG_BINS = 9
HOG_TRUNC = 0.2
HOG_EPS = 1e-4
# 1 / sqrt(18), the texture-channel weight of the 31-dimensional variant.
HOG_TEXTURE_WEIGHT = 0.2357

N_COLOR_NAMES = 11
COLOR_NAMES = ("black", "blue", "brown", "grey", "green", "orange", "pink",
               "purple", "red", "white", "yellow")
DEFAULT_CN_TABLE = Path(__file__).with_name("data") / "colornames.f32"

_UNIT_ANGLES = np.arange(HOG_BINS) * np.pi / HOG_BINS
_UU = np.cos(_UNIT_ANGLES)
_VV = np.sin(_UNIT_ANGLES)


@dataclass(frozen=True)
class FeatureConfig:
    hog: bool = True
    cn: bool = True
    gray: bool = True
    cell: int = 4


def _gradients(patch):
    """Central-difference gradients taken on the strongest color channel."""
    img = np.asarray(patch, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = padded[1:-1, 2:] - padded[1:-1, :-2]
    dy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    if img.shape[2] == 1:
        return dx[:, :, 0], dy[:, :, 0]
    mag2 = dx * dx + dy * dy
    best = np.argmax(mag2, axis=2)[:, :, None]
    return (np.take_along_axis(dx, best, axis=2)[:, :, 0],
            np.take_along_axis(dy, best, axis=2)[:, :, 0])


def _orientation_histogram(patch, cell):
    """Magnitude-weighted 18-bin histogram per cell, bilinear in space."""
    dx, dy = _gradients(patch)
    h, w = dx.shape
    ncy, ncx = h // cell, w // cell
    mag = np.sqrt(dx * dx + dy * dy)

    dots = dx[:, :, None] * _UU + dy[:, :, None] * _VV
    best = np.argmax(np.abs(dots), axis=2)
    neg = np.take_along_axis(dots, best[:, :, None], axis=2)[:, :, 0] < 0
    orient = best + HOG_BINS * neg

    yp = (np.arange(h) + 0.5) / cell - 0.5
    xp = (np.arange(w) + 0.5) / cell - 0.5
    iy = np.floor(yp).astype(np.intp)
    ix = np.floor(xp).astype(np.intp)
    wy1 = yp - iy
    wx1 = xp - ix

    hist = np.zeros(ncy * ncx * 2 * HOG_BINS)
    for oy, wy in ((0, 1 - wy1), (1, wy1)):
        cy = iy + oy
        for ox, wx in ((0, 1 - wx1), (1, wx1)):
            cx = ix + ox
            valid = ((cy >= 0) & (cy < ncy))[:, None] & ((cx >= 0) & (cx < ncx))[None, :]
            idx = ((cy[:, None] * ncx + cx[None, :]) * 2 * HOG_BINS + orient)[valid]
            weight = (wy[:, None] * wx[None, :] * mag)[valid]
            hist += np.bincount(idx, weights=weight, minlength=hist.size)
    return hist.reshape(ncy, ncx, 2 * HOG_BINS)


def hog31(patch, cell=4):
    """Felzenszwalb-style 31-channel HoG over ``cell x cell`` pixel cells.

    Channels 0-17 are contrast-sensitive orientations, 18-26 contrast-insensitive
    orientations and 27-30 the gradient energy under each of the four
    normalization blocks. Border blocks reuse the edge cell energies so the
    output keeps ``floor(dims / cell)`` cells per axis.
    """
    patch = np.asarray(patch)
    if patch.shape[0] < 2 * cell or patch.shape[1] < 2 * cell:
        raise PatchTooSmall(f"patch {patch.shape[:2]} smaller than 2 cells of {cell}px")
    hist = _orientation_histogram(patch, cell)
    ncy, ncx = hist.shape[:2]

    unsigned = hist[:, :, :HOG_BINS] + hist[:, :, HOG_BINS:]
    energy = np.pad(np.sum(unsigned ** 2, axis=2), 1, mode="edge")
    blocks = energy[:-1, :-1] + energy[1:, :-1] + energy[:-1, 1:] + energy[1:, 1:]
    inv = 1.0 / np.sqrt(blocks + HOG_EPS)
    norms = np.stack([inv[:-1, :-1], inv[:-1, 1:], inv[1:, :-1], inv[1:, 1:]], axis=-1)

    sensitive = np.minimum(hist[:, :, :, None] * norms[:, :, None, :], HOG_TRUNC)
    insensitive = np.minimum(unsigned[:, :, :, None] * norms[:, :, None, :], HOG_TRUNC)
    out = np.empty((ncy, ncx, 31))
    out[:, :, :18] = 0.5 * sensitive.sum(axis=3)
    out[:, :, 18:27] = 0.5 * insensitive.sum(axis=3)
    out[:, :, 27:] = HOG_TEXTURE_WEIGHT * sensitive.sum(axis=2)
    return out


def pool_cells(values, cell):
    """Average ``values`` (``(H, W)`` or ``(H, W, C)``) over ``cell x cell`` blocks."""
    values = np.asarray(values, dtype=np.float64)
    ncy, ncx = values.shape[0] // cell, values.shape[1] // cell
    cropped = values[:ncy * cell, :ncx * cell]
    shaped = cropped.reshape(ncy, cell, ncx, cell, *values.shape[2:])
    return shaped.mean(axis=(1, 3))


def load_color_table(path):
    """Read a 32768 x 11 color-name table.

    ``.csv``/``.txt`` files hold one comma-separated row per quantized color;
    anything else is read as raw little-endian float32. Row index is
    ``(r >> 3) * 1024 + (g >> 3) * 32 + (b >> 3)``.
    """
    path = Path(path)
    if path.suffix.lower() in (".csv", ".txt"):
        table = np.loadtxt(path, delimiter=",", dtype=np.float64)
    else:
        table = np.fromfile(path, dtype="<f4").astype(np.float64)
    table = table.reshape(32 * 32 * 32, N_COLOR_NAMES)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _cached_table(path):
    return load_color_table(path)


def default_color_table():
    """Return the shipped table, or the one named by ``SITUP_CN_TABLE``.

    Returns None (with a warning) if the file cannot be found, in which case
    callers fall back to HoG + gray.
    """
    path = os.environ.get("SITUP_CN_TABLE") or str(DEFAULT_CN_TABLE)
    if not Path(path).is_file():
        log.warning("color-name table %s not found; color names disabled", path)
        return None
    return _cached_table(path)


def color_index(patch):
    """Per-pixel row index into the color-name table."""
    rgb = np.clip(np.rint(np.asarray(patch, dtype=np.float64)), 0, 255).astype(np.intp)
    rgb >>= 3
    return (rgb[:, :, 0] * 32 + rgb[:, :, 1]) * 32 + rgb[:, :, 2]


def color_names(patch, table, cell=4):
    patch = np.asarray(patch)
    if patch.ndim != 3 or patch.shape[2] != 3:
        raise GrayscaleInput("color names need an RGB patch")
    return pool_cells(table[color_index(patch)], cell)


def luminance(patch):
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim == 3:
        return patch @ np.array([0.299, 0.587, 0.114])
    return patch


def gray_feature(patch, cell=4):
    """Luminance scaled to [-0.5, 0.5], averaged per cell; shape ``(H', W', 1)``."""
    gray = luminance(patch) / 255.0 - 0.5
    return pool_cells(gray, cell)[:, :, None]


def build_stack(patch, cfg=FeatureConfig(), table=None):
    """Concatenate the enabled features of ``patch`` on the HoG cell grid.

    Color names are skipped for single-channel patches and when no table is
    available.
    """
    patch = np.asarray(patch, dtype=np.float64)
    parts = []
    if cfg.hog:
        parts.append(hog31(patch, cfg.cell))
    if cfg.cn and patch.ndim == 3 and table is not None:
        parts.append(color_names(patch, table, cfg.cell))
    if cfg.gray:
        parts.append(gray_feature(patch, cfg.cell))
    if not parts:
        raise ValueError("at least one feature must be enabled")
    return np.concatenate(parts, axis=2)


def n_channels(cfg, color, table_available=True):
    """Channel count ``build_stack`` produces for this configuration."""
    return (31 * cfg.hog + N_COLOR_NAMES * (cfg.cn and color and table_available)
            + cfg.gray)
