"""2-D discrete Fourier transforms and brute-force correlation oracles.

Conventions: the forward transform is unnormalized and the inverse carries
the 1/(W*H) factor, so the DC bin of ``dft2(g)`` equals ``g.sum()``. Grids are
numpy arrays indexed ``[row, col]``; any size is accepted (no padding to
powers of two).
"""
import numpy as np

from .errors import AsymmetricSpectrum, DimensionMismatch

# 100x the accumulated double-precision FFT error at 128x128.
IMAG_TOL = 1e-8


def dft2(g):
    """Forward 2-D DFT of a real grid (transform over the first two axes)."""
    g = np.asarray(g, dtype=np.float64)
    return np.fft.fft2(g, axes=(0, 1))


def conj_flip(G):
    """Return ``conj(G[(-u) mod H, (-v) mod W])``.

    For the spectrum of a real grid this equals ``G`` itself.
    """
    flipped = np.roll(G[::-1, ::-1], 1, axis=(0, 1))
    return np.conj(flipped)


def idft2(G, check=True):
    """Inverse 2-D DFT returning a real grid.

    Raises AsymmetricSpectrum when ``G`` is not (within ``IMAG_TOL``
    relative to its magnitude) the spectrum of real data. The inner tracking
    loop passes ``check=False`` since its spectra are symmetric by
    construction.
    """
    G = np.asarray(G, dtype=np.complex128)
    out = np.fft.ifft2(G, axes=(0, 1))
    if check:
        scale = max(float(np.abs(out).max(initial=0.0)), 1.0)
        if np.abs(out.imag).max(initial=0.0) > IMAG_TOL * scale:
            raise AsymmetricSpectrum(
                "spectrum is not conjugate-symmetric "
                f"(max imaginary residue {np.abs(out.imag).max():.3g})")
    return out.real.copy()


def hadamard(a, b):
    """Element-wise complex product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return a * b


def dft2_direct(g):
    """Direct-summation 2-D DFT, O(n^2) per bin. Test oracle only."""
    g = np.asarray(g, dtype=np.float64)
    h, w = g.shape
    out = np.zeros((h, w), dtype=np.complex128)
    for u in range(h):
        for v in range(w):
            acc = 0j
            for r in range(h):
                for c in range(w):
                    acc += g[r, c] * np.exp(-2j * np.pi * (u * r / h + v * c / w))
            out[u, v] = acc
    return out


def cyclic_correlate_oracle(x, z):
    """Direct 2-D cyclic cross-correlation.

    ``out[dr, dc] = sum_{r, c} x[r, c] * z[(r + dr) % H, (c + dc) % W]``.
    Quadratic cost; meant for grids up to about 32x32.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {z.shape}")
    h, w = x.shape
    out = np.empty((h, w))
    for dr in range(h):
        for dc in range(w):
            out[dr, dc] = np.sum(x * np.roll(z, (-dr, -dc), axis=(0, 1)))
    return out


def spectral_correlate(x, z):
    """Cyclic cross-correlation through the DFT: idft2(conj(X) * Z)."""
    if np.shape(x) != np.shape(z):
        raise DimensionMismatch(f"shapes differ: {np.shape(x)} vs {np.shape(z)}")
    return idft2(hadamard(np.conj(dft2(x)), dft2(z)))
