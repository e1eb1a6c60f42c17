"""Angular-momentum fibers of the magnetic operator on radial domains.

Separation of variables turns the two-dimensional problem on a disc or
annulus into the family of radial operators

    -u'' - u'/r + [ (m/r - a(r))^2 - B(r) ] u       on  L^2(r dr),

with the natural (Neumann/constant-Robin) condition at the circle(s).  Each
fiber is discretized with P1 elements against the weight ``r dr``: the
r-weight is integrated exactly per element and the potential enters through
its element-midpoint value.  On the disc the ``r=0`` degree of freedom is
removed for m != 0 (form-domain functions with finite angular energy vanish
at the origin) and kept for m = 0.

Counts are Sturm-sequence inertia counts of the tridiagonal pencil, which by
min-max never exceed the true count and are nondecreasing under refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from . import kernels
from .counting import SpectralCount
from .fields import FieldSpec, RobinSpec
from .gauge import GaugeData, solve_radial_potential

EPS_NEG_FACTOR = 1e-10
BISECT_ITERS = 80


@dataclass
class FiberOperator:
    m: int
    rgrid: np.ndarray
    kd: np.ndarray
    ke: np.ndarray
    md: np.ndarray
    me: np.ndarray
    drop_origin: bool
    scale_w: float

    @property
    def eps_neg(self):
        return EPS_NEG_FACTOR * self.scale_w

    # -- counting ----------------------------------------------------------
    def count_below(self, sigma):
        return int(kernels.tridiag_inertia(self.kd, self.ke, self.md, self.me,
                                           np.asarray([sigma], dtype=float))[0])

    def count_negative(self):
        return self.count_below(-self.eps_neg)

    def eigenvalues_below(self, tau):
        """All pencil eigenvalues < tau, by batched bisection on the inertia."""
        k = self.count_below(tau)
        if k == 0:
            return np.empty(0)
        lo = -max(1.0, self.scale_w)
        while self.count_below(lo) > 0:
            lo *= 2.0
        los = np.full(k, lo)
        his = np.full(k, tau)
        targets = np.arange(1, k + 1)
        for _ in range(BISECT_ITERS):
            mids = 0.5 * (los + his)
            cnts = kernels.tridiag_inertia(self.kd, self.ke, self.md, self.me, mids)
            take = cnts >= targets
            his[take] = mids[take]
            los[~take] = mids[~take]
        return 0.5 * (los + his)

    def lowest(self, k=1):
        """The k lowest pencil eigenvalues (regardless of sign)."""
        hi = max(1.0, self.scale_w)
        while self.count_below(hi) < k:
            hi *= 2.0
        vals = self.eigenvalues_below(hi)
        return vals[:k]

    def eigenvector(self, lam):
        """Inverse iteration at `lam`; returns (grid, values incl. any dropped dof)."""
        n = self.kd.shape[0]
        shift = lam + 1e-9 * self.scale_w
        ab = np.zeros((3, n))
        ab[0, 1:] = self.ke - shift * self.me
        ab[1, :] = self.kd - shift * self.md
        ab[2, :-1] = self.ke - shift * self.me
        rng = np.random.default_rng(12345)
        x = rng.normal(size=n)
        for _ in range(3):
            x = sla.solve_banded((1, 1), ab, x)
            x /= np.linalg.norm(x)
        # M-normalize
        mx = self.md * x
        mx[:-1] += self.me * x[1:]
        mx[1:] += self.me * x[:-1]
        x /= np.sqrt(abs(float(x @ mx)))
        if x[np.argmax(np.abs(x))] < 0:
            x = -x
        if self.drop_origin:  # rgrid keeps the origin node; its value is 0
            x = np.concatenate([[0.0], x])
        return self.rgrid, x


def fiber_matrices(m, a_fn, b_fn, r0, r1, n, g_inner=0.0, g_outer=0.0,
                   drop_origin=None):
    """Assemble the tridiagonal pencil of one fiber on [r0, r1] with n elements."""
    r = np.linspace(r0, r1, n + 1)
    h = np.diff(r)
    rl = r[:-1]
    rmid = rl + 0.5 * h

    a_mid = np.asarray(a_fn(rmid), dtype=np.float64)
    b_mid = np.asarray(b_fn(rmid), dtype=np.float64)
    w_mid = (m / rmid - a_mid) ** 2 - b_mid

    # exact r-weighted element integrals for P1 hats
    s_loc = rmid / h                       # stiffness coefficient
    m11 = rl * h / 3.0 + h * h / 12.0
    m12 = rl * h / 6.0 + h * h / 12.0
    m22 = rl * h / 3.0 + h * h / 4.0

    nn = n + 1
    kd = np.zeros(nn)
    ke = np.zeros(n)
    md = np.zeros(nn)
    me = np.zeros(n)
    np.add.at(kd, np.arange(n), s_loc + w_mid * m11)
    np.add.at(kd, np.arange(1, nn), s_loc + w_mid * m22)
    ke[:] = -s_loc + w_mid * m12
    np.add.at(md, np.arange(n), m11)
    np.add.at(md, np.arange(1, nn), m22)
    me[:] = m12

    kd[-1] += g_outer * r1
    if r0 > 0:
        kd[0] += g_inner * r0

    if drop_origin is None:
        drop_origin = (r0 == 0.0 and m != 0)
    if drop_origin:
        if m == 0:
            raise ValueError("origin dof must be kept for m = 0")
        if r0 != 0.0:
            raise ValueError("no origin dof to drop on an annulus fiber")
        kd, ke, md, me = kd[1:], ke[1:], md[1:], me[1:]
    scale_w = max(1.0, float(np.abs(w_mid).max()), float(np.abs(b_mid).max()))
    return FiberOperator(m=m, rgrid=r, kd=kd, ke=ke, md=md, me=me,
                         drop_origin=bool(drop_origin), scale_w=scale_w)


def _robin_constants(bc, domain):
    """Constant Robin values (g_inner, g_outer) for the fiber solver."""
    if bc is None:
        return 0.0, 0.0
    comps = [bc.component(j) for j in range(domain.n_components)]
    for c in comps:
        if c.kind != "constant":
            raise ValueError("fiber solver supports constant Robin data only")
    if domain.kind == "disc":
        return 0.0, comps[0].value
    return comps[1].value, comps[0].value  # component 0 = outer, 1 = inner


def build_fiber(m, gauge, field, bc=None, n=2048, drop_origin=None):
    domain = gauge.domain
    if domain.kind == "disc":
        r0, r1 = 0.0, domain.R
    elif domain.kind == "annulus":
        r0, r1 = domain.R_in, domain.R_out
    else:
        raise ValueError("fibers require a rotationally symmetric domain")
    g_in, g_out = _robin_constants(bc, domain)
    return fiber_matrices(m, gauge.eval_a, field.eval_radial, r0, r1, n,
                          g_inner=g_in, g_outer=g_out, drop_origin=drop_origin)


def fiber_count(m, gauge, field, bc=None, n=2048, drop_origin=None):
    """Negative-eigenvalue count of the fiber at angular momentum m."""
    op = build_fiber(m, gauge, field, bc=bc, n=n, drop_origin=drop_origin)
    thr = -op.eps_neg
    vals = op.eigenvalues_below(thr)
    return SpectralCount(
        count_negative=len(vals),
        eigenvalues_below=list(vals),
        threshold=thr,
        certificate={"m": m, "n": n, "eps_neg": op.eps_neg},
    )


def total_count(gauge, field, bc=None, n=2048, M=None, margin=8):
    """Sum of fiber counts over m in [-M, M] with a truncation certificate.

    The certificate requires the lowest eigenvalue of both edge fibers
    |m| = M to be nonnegative (up to the zero guard); otherwise the cutoff is
    too small and the call fails with instructions to raise it.
    """
    if M is None:
        M = int(np.ceil(max(gauge.flux_total, 0.0))) + margin
    per_fiber = {}
    eigenvalues = []
    total = 0
    eps_used = 0.0
    for m in range(-M, M + 1):
        c = fiber_count(m, gauge, field, bc=bc, n=n)
        per_fiber[m] = c
        total += c.count_negative
        eigenvalues.extend(c.eigenvalues_below)
        eps_used = max(eps_used, -c.threshold)
    lows = {}
    for m in (-M, M):
        op = build_fiber(m, gauge, field, bc=bc, n=n)
        lows[m] = float(op.lowest(1)[0])
        if lows[m] < -op.eps_neg:
            raise RuntimeError(
                f"truncation certificate failed: fiber m={m} has lowest eigenvalue "
                f"{lows[m]:.3e} < 0; raise the fiber cutoff M (currently {M})"
            )
    eigenvalues.sort()
    count = SpectralCount(
        count_negative=total,
        eigenvalues_below=eigenvalues,
        threshold=-eps_used if eps_used > 0 else -np.finfo(float).tiny,
        certificate={
            "n": n,
            "fiber_range": [-M, M],
            "edge_fiber_lowest": {str(k): v for k, v in lows.items()},
            "eps_neg": eps_used,
        },
    )
    return count, per_fiber


def zero_mode_slope_exact(m, flux, R):
    """Boundary derivative of r^m e^{-phi}: (m - flux) R^(m-1)."""
    if m < 0:
        raise ValueError("zero modes exist for m >= 0 only")
    diff = m - flux
    if diff == 0.0:
        return 0.0
    return diff * R ** (m - 1)


def zero_mode_derivative(m, gauge, R=None, stencil=5):
    """Numeric boundary derivative of the explicit mode u = r^m e^{-phi}.

    Differentiates the constructed profile one-sidedly at r = R; agrees with
    the closed form (m - flux) R^(m-1), vanishing exactly when the flux equals m.
    """
    if gauge.domain.kind != "disc":
        raise ValueError("zero modes are a disc construction")
    if m < 0:
        raise ValueError("zero modes exist for m >= 0 only")
    if R is None:
        R = gauge.domain.R
    if gauge.constant_beta is not None:
        r = np.linspace(0.0, R, 8193)
    else:
        r = gauge.r
    u = r**m * np.exp(-gauge.eval_phi(r))
    # one-sided finite difference of order `stencil-1` at the right endpoint
    h = r[-1] - r[-2]
    pts = u[-stencil:]
    coeffs = _fd_right_coeffs(stencil) / h
    return float(coeffs @ pts)


def _fd_right_coeffs(k):
    """Weights of the (k-1)-order one-sided first-derivative stencil at the last node."""
    a = np.vander(np.arange(-(k - 1), 1, dtype=float), k, increasing=True).T
    rhs = np.zeros(k)
    rhs[1] = 1.0
    return np.linalg.solve(a, rhs)


def feynman_hellmann_slope(m, field, n=2048, R=1.0):
    """Eigenvalue slope in the field-strength parameter at the zero-mode point.

    For the scaled family (field strength beta times the base field) the
    lowest fiber eigenvalue vanishes at beta = m / flux; the derivative there
    is the negative weighted integral of [2(m/r - beta*a)a + B] |u|^2 r dr,
    strictly negative for nonzero nonnegative fields.
    """
    if m < 0:
        raise ValueError("slope evaluation needs m >= 0")
    domain_spec = _disc(R)
    base = solve_radial_potential(field, domain_spec)
    flux = base.flux_total
    if flux <= 0.0:
        raise ValueError("field has nonpositive flux; no zero-mode crossing")
    beta = m / flux
    op = fiber_matrices(
        m,
        lambda r: beta * base.eval_a(r),
        lambda r: beta * field.eval_radial(r),
        0.0, R, n,
    )
    lam = float(op.lowest(1)[0])
    grid, u = op.eigenvector(lam)
    rmid = 0.5 * (grid[:-1] + grid[1:]) if not op.drop_origin else None
    # midpoint quadrature against the base-field integrand
    r_full = np.linspace(0.0, R, n + 1)
    if op.drop_origin:
        u_full = np.concatenate([[0.0], u]) if u.shape[0] == n else u
    else:
        u_full = u
    rm = 0.5 * (r_full[:-1] + r_full[1:])
    um = 0.5 * (u_full[:-1] + u_full[1:])
    a_m = base.eval_a(rm)
    b_m = field.eval_radial(rm)
    h = np.diff(r_full)
    integrand = (2.0 * (m / rm - beta * a_m) * a_m + b_m) * um**2 * rm
    norm = float(np.sum(um**2 * rm * h))
    return float(-np.sum(integrand * h) / norm)


def _disc(R):
    from .geometry import DomainSpec

    return DomainSpec.disc(R)
