"""Linear-kernel correlation filter: labels, training, detection and update.

Feature stacks are real arrays shaped ``(H, W, C)``; their spectra are
complex arrays of the same shape transformed over the two spatial axes. The
kernel correlation used by ``train`` and ``detect`` is divided by ``H*W*C``,
which keeps response magnitudes independent of the grid size so that a
single regularization value works for every template.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .spectral import dft2, idft2


@dataclass(frozen=True)
class TrackerModel:
    xhat: np.ndarray      # (H, W, C) complex, learned template
    alphahat: np.ndarray  # (H, W) complex, dual coefficients
    lam: float
    theta: float

    @property
    def shape(self):
        return self.alphahat.shape


@dataclass(frozen=True)
class ResponseMap:
    grid: np.ndarray
    apce: float
    peak_value: float
    peak_pos: tuple


def _as_stack(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[:, :, None]
    return x


def gaussian_labels(w, h, sigma):
    """Gaussian regression target peaking at the wrapped origin, shape ``(h, w)``."""
    dr = np.arange(h)
    dr = np.minimum(dr, h - dr)
    dc = np.arange(w)
    dc = np.minimum(dc, w - dc)
    return np.exp(-(dr[:, None] ** 2 + dc[None, :] ** 2) / (2.0 * sigma ** 2))


def label_sigma(target_cells_w, target_cells_h, factor=0.1):
    """Label bandwidth in cells: ``factor`` times the geometric-mean target extent."""
    return factor * np.sqrt(target_cells_w * target_cells_h)


def linear_kernel_corr(xf, zf):
    """Multi-channel linear kernel in the Fourier domain, ``sum_c conj(xf_c) * zf_c``.

    Unnormalized; ``kernel_hat`` applies the grid-size normalization.
    """
    if xf.shape != zf.shape:
        raise DimensionMismatch(f"spectra differ: {xf.shape} vs {zf.shape}")
    if xf.ndim == 2:
        return np.conj(xf) * zf
    return np.einsum("ijc,ijc->ij", np.conj(xf), zf)


def kernel_hat(xf, zf):
    return linear_kernel_corr(xf, zf) / xf.size


def train(x, y, lam, theta=1.0):
    """Solve for the dual coefficients ``yhat / (kxx_hat + lam)``."""
    x = _as_stack(x)
    if x.shape[:2] != y.shape:
        raise DimensionMismatch(f"features {x.shape[:2]} vs labels {y.shape}")
    xf = dft2(x)
    alphahat = dft2(y) / (kernel_hat(xf, xf) + lam)
    return TrackerModel(xf, alphahat, lam, theta)


def apce(f):
    """Average peak-to-correlation energy of a response grid.

    ``(max - min)^2 / mean((f - min)^2)``; a flat grid scores 0.
    """
    f = np.asarray(f, dtype=np.float64)
    fmax = f.max()
    fmin = f.min()
    energy = np.mean((f - fmin) ** 2)
    # an underflowing energy is indistinguishable from a flat grid
    if fmax == fmin or energy == 0:
        return 0.0
    return float((fmax - fmin) ** 2 / energy)


def make_response(grid):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.max() == grid.min():
        return ResponseMap(grid, 0.0, float(grid.flat[0]), (0, 0))
    flat = int(np.argmax(grid))
    peak = divmod(flat, grid.shape[1])
    return ResponseMap(grid, apce(grid), float(grid.flat[flat]), peak)


def detect(model, z):
    """Response map of ``z`` under ``model`` (row-major first max wins ties)."""
    z = _as_stack(z)
    if z.shape != model.xhat.shape:
        raise DimensionMismatch(f"features {z.shape} vs model {model.xhat.shape}")
    zf = dft2(z)
    grid = idft2(kernel_hat(model.xhat, zf) * model.alphahat)
    return make_response(grid)


def decode_displacement(peak_pos, w, h):
    """Signed ``(dy, dx)`` in cells; indices past half the grid wrap negative."""
    row, col = peak_pos
    dy = row if row <= h / 2 else row - h
    dx = col if col <= w / 2 else col - w
    return dy, dx


def interpolate(model, new, theta=None):
    """``theta * new + (1 - theta) * model`` on both template and coefficients."""
    theta = model.theta if theta is None else theta
    return TrackerModel(theta * new.xhat + (1 - theta) * model.xhat,
                        theta * new.alphahat + (1 - theta) * model.alphahat,
                        model.lam, model.theta)


def update(model, x_new, y):
    return interpolate(model, train(x_new, y, model.lam))


def ridge_regression_oracle(x, y, lam):
    """Primal ridge regression on the explicit circulant data matrix.

    Row ``u`` of the data matrix is the sample ``x[(i + u) mod n]``, the shift
    whose prediction lands in response bin ``u``. Returns
    ``(X^T X + lam I)^{-1} X^T y``. Quadratic memory; test-scale only.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    X = circulant_rows(x)
    return np.linalg.solve(X.T @ X + lam * np.eye(n), X.T @ y)


def circulant_rows(x):
    """Matrix whose row ``u`` is ``np.roll(x, -u)``."""
    x = np.asarray(x, dtype=np.float64)
    return np.stack([np.roll(x, -u) for u in range(x.size)])
