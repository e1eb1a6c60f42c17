"""Periodic-function helpers shared by the boundary-operator modules.

Functions on a boundary component of length L are represented by centered
Fourier coefficient arrays ``c`` of odd length ``2K+1`` with
``f(s) = sum_k c[K+k] exp(2i pi k s / L)``, so ``c[K]`` is the mean.
"""

from __future__ import annotations

import numpy as np


def coeffs_from_callable(fun, L, K, oversample=8):
    """Centered Fourier coefficients of a callable, FFT at >= oversample*K points."""
    n = max(int(oversample) * (2 * K + 1), 64)
    s = L * np.arange(n) / n
    vals = np.asarray(fun(s), dtype=np.complex128)
    if vals.shape != s.shape:
        vals = np.full(n, complex(vals)) if vals.ndim == 0 else np.broadcast_to(vals, s.shape)
    hat = np.fft.fft(vals) / n
    c = np.zeros(2 * K + 1, dtype=np.complex128)
    c[K] = hat[0]
    for k in range(1, K + 1):
        c[K + k] = hat[k]
        c[K - k] = hat[-k]
    return c


def coeffs_from_samples(vals, L, K):
    """Centered coefficients from uniform samples on [0, L)."""
    vals = np.asarray(vals, dtype=np.complex128)
    n = vals.shape[0]
    if 2 * K + 1 > n:
        raise ValueError(f"need at least {2 * K + 1} samples for K={K}")
    hat = np.fft.fft(vals) / n
    c = np.zeros(2 * K + 1, dtype=np.complex128)
    c[K] = hat[0]
    for k in range(1, K + 1):
        c[K + k] = hat[k]
        c[K - k] = hat[-k]
    return c


def eval_series(c, s, L):
    """Evaluate the trigonometric series at points ``s``."""
    c = np.asarray(c)
    K = (c.shape[0] - 1) // 2
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros(s.shape, dtype=np.complex128)
    for k in range(-K, K + 1):
        out += c[K + k] * np.exp(2j * np.pi * k * s / L)
    return out


def is_hermitian_symmetric(c, tol=1e-12):
    """True when the series is real-valued: c[-k] == conj(c[k])."""
    c = np.asarray(c)
    scale = max(1.0, np.abs(c).max())
    return bool(np.all(np.abs(c[::-1] - np.conj(c)) <= tol * scale))


def antiderivative_coeffs(c, L):
    """Coefficients of the primitive of the mean-zero part, vanishing mean.

    Returns (mean, cprim) with ``int_0^s f = mean*s + P(s) - P(0)`` where P is
    the series given by cprim.  Exact for band-limited input.
    """
    c = np.asarray(c, dtype=np.complex128)
    K = (c.shape[0] - 1) // 2
    cp = np.zeros_like(c)
    for k in range(-K, K + 1):
        if k != 0:
            cp[K + k] = c[K + k] * L / (2j * np.pi * k)
    return c[K], cp


def multiplication_matrix(c, modes_row, modes_col):
    """Matrix of multiplication by the series in the Fourier basis.

    Entry (m, n) = coefficient of ``exp(2i pi (m-n) s/L)`` in the series,
    i.e. ``c_hat(m - n)`` (zero outside the stored band).
    """
    c = np.asarray(c)
    K = (c.shape[0] - 1) // 2
    modes_row = np.asarray(modes_row)
    modes_col = np.asarray(modes_col)
    diff = modes_row[:, None] - modes_col[None, :]
    out = np.zeros(diff.shape, dtype=np.complex128)
    mask = np.abs(diff) <= K
    out[mask] = c[K + diff[mask]]
    return out


def trapezoid_mean(fun, L, n=4096):
    """Mean value of a periodic callable by the (spectrally accurate) trapezoid rule."""
    s = L * np.arange(n) / n
    return np.mean(np.asarray(fun(s), dtype=np.float64) + 0.0)
