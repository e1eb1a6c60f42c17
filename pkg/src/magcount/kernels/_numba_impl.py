"""Numba-compiled hot kernels (see package docstring for contracts)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _tridiag_inertia_core(kd, ke, md, me, sigmas, pivmin):
    n = kd.shape[0]
    ns = sigmas.shape[0]
    counts = np.zeros(ns, dtype=np.int64)
    for s in range(ns):
        sig = sigmas[s]
        cnt = 0
        d = kd[0] - sig * md[0]
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            cnt += 1
        for i in range(1, n):
            e = ke[i - 1] - sig * me[i - 1]
            d = (kd[i] - sig * md[i]) - e * e / d
            if abs(d) < pivmin:
                d = -pivmin
            if d < 0.0:
                cnt += 1
        counts[s] = cnt
    return counts


def tridiag_inertia(kd, ke, md, me, sigmas):
    """Count pencil eigenvalues below each shift, tridiagonal (K, M)."""
    kd = np.ascontiguousarray(kd, dtype=np.float64)
    ke = np.ascontiguousarray(ke, dtype=np.float64)
    md = np.ascontiguousarray(md, dtype=np.float64)
    me = np.ascontiguousarray(me, dtype=np.float64)
    sig = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    scale = max(np.abs(kd).max(), np.abs(md).max() * (1.0 + np.abs(sig).max()), 1.0)
    pivmin = np.finfo(np.float64).tiny * scale * 1e16
    return _tridiag_inertia_core(kd, ke, md, me, sig, pivmin)


@njit(cache=True)
def _banded_inertia_core(ab, pivmin):
    b = ab.shape[0] - 1
    n = ab.shape[1]
    work = ab.copy()
    neg = 0
    clamped = 0
    for j in range(n):
        d = work[0, j].real
        if abs(d) < pivmin:
            d = -pivmin
            clamped += 1
        if d < 0.0:
            neg += 1
        bl = min(b, n - 1 - j)
        # rank-1 update of the trailing block inside the band:
        # A[j+r, j+c] -= w_r * conj(w_c) * d  for 1 <= c <= r <= bl
        for c in range(1, bl + 1):
            wcc = np.conj(work[c, j]) / d
            if wcc == 0.0:
                continue
            for r in range(c, bl + 1):
                work[r - c, j + c] -= work[r, j] * wcc
    return neg, clamped


def banded_inertia(ab, pivmin):
    """Negative pivots of LDL^H for Hermitian lower banded storage."""
    ab = np.ascontiguousarray(ab, dtype=np.complex128)
    neg, clamped = _banded_inertia_core(ab, float(pivmin))
    return int(neg), int(clamped)


@njit(cache=True)
def _p1_magnetic_core(x, y, tris, aq, bq):
    nt = tris.shape[0]
    ke = np.zeros((nt, 3, 3), dtype=np.complex128)
    me = np.zeros((nt, 3, 3), dtype=np.float64)
    area = np.zeros(nt, dtype=np.float64)
    lam = np.empty((3, 3), dtype=np.float64)
    for q in range(3):
        for i in range(3):
            lam[q, i] = 0.0 if q == i else 0.5
    gx = np.empty(3, dtype=np.float64)
    gy = np.empty(3, dtype=np.float64)
    for t in range(nt):
        i0, i1, i2 = tris[t, 0], tris[t, 1], tris[t, 2]
        x0, x1, x2 = x[i0], x[i1], x[i2]
        y0, y1, y2 = y[i0], y[i1], y[i2]
        ar = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
        area[t] = ar
        inv = 1.0 / (2.0 * ar)
        gx[0] = (y1 - y2) * inv
        gx[1] = (y2 - y0) * inv
        gx[2] = (y0 - y1) * inv
        gy[0] = (x2 - x1) * inv
        gy[1] = (x0 - x2) * inv
        gy[2] = (x1 - x0) * inv
        w3 = ar / 3.0
        for i in range(3):
            for j in range(3):
                kij = ar * (gx[i] * gx[j] + gy[i] * gy[j]) + 0.0j
                for q in range(3):
                    cq = aq[t, q, 0] ** 2 + aq[t, q, 1] ** 2 - bq[t, q]
                    gi = aq[t, q, 0] * gx[i] + aq[t, q, 1] * gy[i]
                    gj = aq[t, q, 0] * gx[j] + aq[t, q, 1] * gy[j]
                    kij += w3 * (cq * lam[q, i] * lam[q, j])
                    kij += 1j * w3 * (gi * lam[q, j] - lam[q, i] * gj)
                ke[t, i, j] = kij
                me[t, i, j] = ar / 12.0 * (2.0 if i == j else 1.0)
    return ke, me, area


def p1_magnetic_elements(x, y, tris, aq, bq):
    """Element matrices of the magnetic form, three-midpoint quadrature."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.int64)
    aq = np.ascontiguousarray(aq, dtype=np.float64)
    bq = np.ascontiguousarray(bq, dtype=np.float64)
    return _p1_magnetic_core(x, y, tris, aq, bq)
