"""Gauge fixing: scalar potential, tangential vector potential, fluxes.

The vector potential is always the divergence-free tangential gauge obtained
from the scalar potential solving the Dirichlet Poisson problem
``laplace(phi) = B`` with ``phi = 0`` on every boundary component, via
``A = (-d2 phi, d1 phi)``.  On rotationally symmetric domains the problem
reduces to a radial ODE solved in closed quadrature form; otherwise a P1
finite element solve on the domain mesh is used.

Orientation: the tangent tau keeps the interior on the left (counterclockwise
outer boundary, clockwise holes), so on an annulus the inner-boundary flux is
``-R_in * a(R_in)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field as dc_field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import cumulative_simpson

from . import fourier
from .fields import FieldSpec, RobinSpec
from .geometry import DomainSpec, Mesh


@dataclass
class GaugeData:
    kind: str                      # 'radial' | 'fem'
    domain: DomainSpec
    flux_components: List[float]
    flux_total: float
    # radial data
    r: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    constant_beta: Optional[float] = None
    # fem data
    mesh: Optional[Mesh] = None
    phi_nodal: Optional[np.ndarray] = None
    A_elem: Optional[np.ndarray] = None
    a_tau_mid: Optional[List[np.ndarray]] = None  # per component, at edge midpoints
    # robin fluxes (filled by attach_robin)
    robin_flux_components: List[float] = dc_field(default_factory=list)
    robin_flux_total: float = 0.0
    certificate: dict = dc_field(default_factory=dict)

    # -- radial evaluation -------------------------------------------------
    def eval_a(self, rv):
        rv = np.asarray(rv, dtype=np.float64)
        if self.kind != "radial":
            raise ValueError("eval_a needs a radial gauge")
        if self.constant_beta is not None:
            return 0.5 * self.constant_beta * rv
        return np.interp(rv, self.r, self.a)

    def eval_phi(self, rv):
        rv = np.asarray(rv, dtype=np.float64)
        if self.kind != "radial":
            raise ValueError("eval_phi needs a radial gauge")
        if self.constant_beta is not None:
            R = self.domain.R
            return 0.25 * self.constant_beta * (rv**2 - R**2)
        return np.interp(rv, self.r, self.phi)

    def eval_A_xy(self, x, y):
        """Vector potential at points; exact for radial gauges."""
        if self.kind != "radial":
            raise ValueError("eval_A_xy needs a radial gauge; use A_elem for FEM gauges")
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        rv = np.hypot(x, y)
        av = self.eval_a(rv)
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(rv > 0, av / np.where(rv > 0, rv, 1.0), 0.0)
        return np.stack([-y * scale, x * scale], axis=-1)

    def a_tau_constant(self, j):
        """Tangential trace on component j when it is constant (radial gauges)."""
        if self.kind != "radial":
            raise ValueError("constant tangential trace only for radial gauges")
        if self.domain.kind == "disc":
            return float(self.eval_a(self.domain.R))
        if j == 0:
            return float(self.eval_a(self.domain.R_out))
        return -float(self.eval_a(self.domain.R_in))

    def a_tau_series(self, j, K=64):
        """Centered Fourier coefficients of the tangential trace on component j."""
        L = self.domain.component_lengths()[j]
        if self.kind == "radial":
            c = np.zeros(2 * K + 1, dtype=np.complex128)
            c[K] = self.a_tau_constant(j)
            return c, L
        loop = self.mesh.loops[j]
        order = np.argsort(loop.s_mid)
        s = loop.s_mid[order]
        v = self.a_tau_mid[j][order]
        grid = L * np.arange(4096) / 4096
        vals = np.interp(grid, np.concatenate([s, [s[0] + L]]),
                         np.concatenate([v, [v[0]]]), period=L)
        return fourier.coeffs_from_samples(vals, L, K), L

    # -- exports -----------------------------------------------------------
    def to_csv(self, path_or_buf):
        close = False
        if isinstance(path_or_buf, (str, bytes)):
            f = open(path_or_buf, "w", newline="")
            close = True
        else:
            f = path_or_buf
        try:
            w = csv.writer(f)
            if self.kind == "radial":
                w.writerow(["r", "phi", "a"])
                for rv, pv, av in zip(self.r, self.phi, self.a):
                    w.writerow([repr(rv), repr(pv), repr(av)])
            else:
                w.writerow(["x", "y", "phi"])
                for (x, y), pv in zip(self.mesh.nodes, self.phi_nodal):
                    w.writerow([repr(x), repr(y), repr(pv)])
        finally:
            if close:
                f.close()


def attach_robin(gauge, robin):
    """Fill the Robin flux fields of `gauge` from a RobinSpec."""
    comps, total = robin_fluxes(robin, gauge.domain)
    gauge.robin_flux_components = comps
    gauge.robin_flux_total = total
    return gauge


# ---------------------------------------------------------------------------
# radial gauge


def solve_radial_potential(field, domain, n=8193):
    """Radial gauge on a disc or annulus.

    Disc: ``a(r) = (1/r) int_0^r B(rho) rho drho``, ``phi' = a``, ``phi(R)=0``.
    Annulus: same ODE with the two-point condition ``phi(R_in)=phi(R_out)=0``,
    which fixes the circulation constant and hence the per-component fluxes.
    """
    if not isinstance(field, FieldSpec) or not field.is_radial:
        raise ValueError("solve_radial_potential needs a radial field")
    if domain.kind == "disc":
        R = domain.R
        if field.kind == "constant":
            beta = field.beta
            r = np.linspace(0.0, R, n)
            g = GaugeData(
                kind="radial", domain=domain,
                flux_components=[0.5 * beta * R**2],
                flux_total=0.5 * beta * R**2,
                r=r, phi=0.25 * beta * (r**2 - R**2), a=0.5 * beta * r,
                constant_beta=beta,
            )
            return g
        r = np.linspace(0.0, R, n)
        integ = cumulative_simpson(field.eval_radial(r) * r, x=r, initial=0.0)
        a = np.zeros_like(r)
        a[1:] = integ[1:] / r[1:]
        a[0] = 0.0
        phi = cumulative_simpson(a, x=r, initial=0.0)
        phi -= phi[-1]
        flux = float(integ[-1])
        return GaugeData(kind="radial", domain=domain, flux_components=[flux],
                         flux_total=flux, r=r, phi=phi, a=a)
    if domain.kind == "annulus":
        R_in, R_out = domain.R_in, domain.R_out
        r = np.linspace(R_in, R_out, n)
        G = cumulative_simpson(field.eval_radial(r) * r, x=r, initial=0.0)
        denom = np.log(R_out / R_in)
        c = -float(cumulative_simpson(G / r, x=r, initial=0.0)[-1]) / denom
        a = (G + c) / r
        phi = cumulative_simpson(a, x=r, initial=0.0)
        phi -= phi[0]
        flux_outer = float(G[-1] + c)
        flux_inner = float(-c)
        g = GaugeData(
            kind="radial", domain=domain,
            flux_components=[flux_outer, flux_inner],
            flux_total=flux_outer + flux_inner,
            r=r, phi=phi, a=a,
        )
        g.certificate["phi_outer_residual"] = float(abs(phi[-1]))
        return g
    raise ValueError(f"radial solver does not support domain kind {domain.kind!r}")


# ---------------------------------------------------------------------------
# 2D FEM gauge


def _p1_poisson(mesh, b_centroid):
    """Assemble P1 stiffness and the load of `-B` (so that laplace(phi)=B)."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    t = mesh.tris
    x0, x1, x2 = x[t[:, 0]], x[t[:, 1]], x[t[:, 2]]
    y0, y1, y2 = y[t[:, 0]], y[t[:, 1]], y[t[:, 2]]
    area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    gx = np.stack([y1 - y2, y2 - y0, y0 - y1], axis=1) / (2 * area)[:, None]
    gy = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1) / (2 * area)[:, None]
    ke = (np.einsum("ti,tj->tij", gx, gx) + np.einsum("ti,tj->tij", gy, gy)) * area[:, None, None]
    ii = np.repeat(t, 3, axis=1).ravel()
    jj = np.tile(t, (1, 3)).ravel()
    K = sp.coo_matrix((ke.ravel(), (ii, jj)), shape=(mesh.n_nodes, mesh.n_nodes)).tocsr()
    load = np.zeros(mesh.n_nodes)
    np.add.at(load, t.ravel(), np.repeat(-b_centroid * area / 3.0, 3))
    return K, load


def solve_potential_2d(field, domain, mesh_level, mesh=None):
    """FEM solution of the Dirichlet problem laplace(phi)=B and its gauge data."""
    if mesh is None:
        mesh = domain.mesh(mesh_level)
    elif mesh.level != mesh_level:
        raise ValueError(f"mesh level {mesh.level} does not match requested {mesh_level}")
    cent = mesh.centroids()
    b_cent = field.eval_xy(cent[:, 0], cent[:, 1])
    K, load = _p1_poisson(mesh, b_cent)

    bset = np.array(sorted(mesh.boundary_node_set()), dtype=np.int64)
    free = np.setdiff1d(np.arange(mesh.n_nodes), bset)
    Kff = K[free][:, free].tocsc()
    try:
        phi_free = spla.spsolve(Kff, load[free])
    except Exception as exc:  # singular stiffness: report the worst element
        areas = mesh.areas()
        worst = int(np.argmin(np.abs(areas)))
        raise RuntimeError(
            f"Poisson stiffness factorization failed ({exc}); "
            f"most degenerate element {worst} has area {areas[worst]:.3e}"
        ) from exc
    phi = np.zeros(mesh.n_nodes)
    phi[free] = phi_free

    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    t = mesh.tris
    x0, x1, x2 = x[t[:, 0]], x[t[:, 1]], x[t[:, 2]]
    y0, y1, y2 = y[t[:, 0]], y[t[:, 1]], y[t[:, 2]]
    area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    gx = np.stack([y1 - y2, y2 - y0, y0 - y1], axis=1) / (2 * area)[:, None]
    gy = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1) / (2 * area)[:, None]
    ph = phi[t]
    dphix = np.einsum("ti,ti->t", gx, ph)
    dphiy = np.einsum("ti,ti->t", gy, ph)
    A_elem = np.stack([-dphiy, dphix], axis=1)

    # Per-component circulation of A equals the outward Dirichlet flux of phi,
    # evaluated through the residual functional sum_{i in Gamma_j} (K phi - F)_i.
    # This is superconvergent and makes the Stokes identity
    # sum_j Phi_j = (1/2pi) int B hold exactly at the quadrature level.
    residual = K @ phi - load
    a_tau_mid = []
    flux_components = []
    for loop in mesh.loops:
        pe = mesh.nodes[loop.edges[:, 0]]
        qe = mesh.nodes[loop.edges[:, 1]]
        tau = (qe - pe) / loop.edge_len[:, None]
        at = np.einsum("ej,ej->e", tau, A_elem[loop.edge_tri])
        a_tau_mid.append(at)
        flux_components.append(float(np.sum(residual[loop.nodes]) / (2 * np.pi)))

    g = GaugeData(
        kind="fem", domain=domain,
        flux_components=flux_components, flux_total=float(sum(flux_components)),
        mesh=mesh, phi_nodal=phi, A_elem=A_elem, a_tau_mid=a_tau_mid,
    )
    g.certificate = {
        "phi_boundary_max": float(np.abs(phi[bset]).max() if len(bset) else 0.0),
        "curl_residual": float(np.abs(residual[free]).max() if len(free) else 0.0),
        "nu_dot_A_max": _nu_dot_a_max(mesh, A_elem),
        "div_residual": _div_residual(mesh, A_elem, free),
    }
    return g


def _nu_dot_a_max(mesh, A_elem):
    worst = 0.0
    for loop in mesh.loops:
        pe = mesh.nodes[loop.edges[:, 0]]
        qe = mesh.nodes[loop.edges[:, 1]]
        tau = (qe - pe) / loop.edge_len[:, None]
        nu = np.stack([-tau[:, 1], tau[:, 0]], axis=1)  # J tau, inward
        vals = np.einsum("ej,ej->e", nu, A_elem[loop.edge_tri])
        if vals.size:
            worst = max(worst, float(np.abs(vals).max()))
    return worst


def _div_residual(mesh, A_elem, free):
    """Max over interior nodes of the weak divergence of A (exact zero up to roundoff)."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    t = mesh.tris
    x0, x1, x2 = x[t[:, 0]], x[t[:, 1]], x[t[:, 2]]
    y0, y1, y2 = y[t[:, 0]], y[t[:, 1]], y[t[:, 2]]
    area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    gx = np.stack([y1 - y2, y2 - y0, y0 - y1], axis=1) / (2 * area)[:, None]
    gy = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1) / (2 * area)[:, None]
    div = np.zeros(mesh.n_nodes)
    contrib = (A_elem[:, 0:1] * gx + A_elem[:, 1:2] * gy) * area[:, None]
    np.add.at(div, t.ravel(), contrib.ravel())
    return float(np.abs(div[free]).max() if len(free) else 0.0)


# ---------------------------------------------------------------------------
# Robin fluxes


def robin_fluxes(robin, domain):
    """Per-component Robin fluxes (1/2pi) int_{Gamma_j} g ds and their total."""
    lengths = domain.component_lengths()
    comps = []
    for j, L in enumerate(lengths):
        comp = robin.component(j)
        comps.append(float(comp.mean(L) * L / (2 * np.pi)))
    return comps, float(sum(comps))
