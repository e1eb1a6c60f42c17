"""Pure-numpy reference implementations of the hot kernels.

These mirror ``_numba_impl`` exactly (same clamping conventions, same
quadrature) so the two backends are interchangeable; loops run over the
short axis and vectorize over the long one.
"""

from __future__ import annotations

import numpy as np


def tridiag_inertia(kd, ke, md, me, sigmas):
    """Count pencil eigenvalues below each shift, tridiagonal (K, M).

    Runs the LDL^T pivot recursion of K - sigma*M for all shifts at once.
    Pivots within ``pivmin`` of zero are clamped to ``-pivmin`` (counted as
    negative), the usual bisection convention.
    """
    kd = np.asarray(kd, dtype=np.float64)
    md = np.asarray(md, dtype=np.float64)
    sig = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    n = kd.shape[0]
    scale = max(np.abs(kd).max(), np.abs(md).max() * (1.0 + np.abs(sig).max()), 1.0)
    pivmin = np.finfo(np.float64).tiny * scale * 1e16
    counts = np.zeros(sig.shape[0], dtype=np.int64)
    d = kd[0] - sig * md[0]
    small = np.abs(d) < pivmin
    d[small] = -pivmin
    counts += (d < 0.0).astype(np.int64)
    for i in range(1, n):
        e = ke[i - 1] - sig * me[i - 1]
        d = (kd[i] - sig * md[i]) - e * e / d
        small = np.abs(d) < pivmin
        d[small] = -pivmin
        counts += (d < 0.0).astype(np.int64)
    if np.isscalar(sigmas) or np.asarray(sigmas).ndim == 0:
        return counts[:1]
    return counts


def banded_inertia(ab, pivmin):
    """Negative pivots of LDL^H for a Hermitian matrix in lower banded storage.

    ``ab[k, j] = A[j + k, j]`` for ``0 <= k <= b``.  Uses a rolling dense
    window of the active (b+1)x(b+1) block so the only Python loop is over
    columns.  Returns ``(neg, n_clamped)``.
    """
    ab = np.asarray(ab)
    b = ab.shape[0] - 1
    n = ab.shape[1]
    if b == 0:
        d = ab[0].real.copy()
        clamped = int(np.sum(np.abs(d) < pivmin))
        d[np.abs(d) < pivmin] = -pivmin
        return int(np.sum(d < 0.0)), clamped

    w = np.zeros((b + 1, b + 1), dtype=np.complex128)
    m0 = min(b + 1, n)
    for c in range(m0):
        rows = min(b + 1 - c, n - c)
        w[c : c + rows, c] = ab[:rows, c]
        w[c, c + 1 : c + rows] = np.conj(ab[1:rows, c])

    neg = 0
    clamped = 0
    for j in range(n):
        d = w[0, 0].real
        if abs(d) < pivmin:
            d = -pivmin
            clamped += 1
        if d < 0.0:
            neg += 1
        col = w[1:, 0] / d
        w[1:, 1:] -= np.outer(col, np.conj(col)) * d
        # slide the window to the next leading position
        w[:-1, :-1] = w[1:, 1:]
        w[-1, :] = 0.0
        w[:, -1] = 0.0
        nxt = j + b + 1
        if nxt < n:
            # incoming row/column nxt contributes A[nxt, nxt-b .. nxt]
            for c in range(b + 1):
                gcol = nxt - b + c
                w[b, c] = ab[b - c, gcol]
                w[c, b] = np.conj(w[b, c])
    return neg, clamped


_QP_LAMBDA = np.array(
    [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]], dtype=np.float64
)  # barycentric coordinates of the three edge midpoints


def p1_magnetic_elements(x, y, tris, aq, bq):
    """Vectorized element matrices for the magnetic form and the mass form.

    Parameters
    ----------
    x, y : (nn,) node coordinates
    tris : (nt, 3) CCW connectivity
    aq : (nt, 3, 2) vector potential at the three edge midpoints
    bq : (nt, 3) field (already sign-adjusted) at the three edge midpoints

    Returns
    -------
    ke : (nt, 3, 3) complex element matrices of
         ``int |(-i grad - A)u|^2 - B|u|^2``
    me : (nt, 3, 3) real element mass matrices
    area : (nt,) signed triangle areas
    """
    tris = np.asarray(tris)
    x0, x1, x2 = (x[tris[:, k]] for k in range(3))
    y0, y1, y2 = (y[tris[:, k]] for k in range(3))
    area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))

    gx = np.stack([y1 - y2, y2 - y0, y0 - y1], axis=1) / (2.0 * area)[:, None]
    gy = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1) / (2.0 * area)[:, None]

    stiff = (
        np.einsum("ti,tj->tij", gx, gx) + np.einsum("ti,tj->tij", gy, gy)
    ) * area[:, None, None]

    # g[t, q, i] = A(q) . grad(lambda_i)
    g = np.einsum("tq,ti->tqi", aq[:, :, 0], gx) + np.einsum(
        "tq,ti->tqi", aq[:, :, 1], gy
    )
    lam = _QP_LAMBDA
    c = aq[:, :, 0] ** 2 + aq[:, :, 1] ** 2 - bq  # |A|^2 - B at quad points
    zero = np.einsum("tq,qi,qj->tij", c, lam, lam) * (area / 3.0)[:, None, None]
    cross = (
        np.einsum("tqi,qj->tij", g, lam) - np.einsum("qi,tqj->tij", lam, g)
    ) * (area / 3.0)[:, None, None]

    ke = stiff + zero + 1j * cross
    me = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    return ke, me.astype(np.float64), area
