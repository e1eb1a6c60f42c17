"""Domains, structured triangle meshes, and boundary bookkeeping.

Supported domains: disc D(0,R), annulus, and images of the disc under an
explicit conformal polynomial map.  Meshes form a nested hierarchy: the
vertex set of level ``l`` is contained in that of level ``l+1`` (disc meshes
are concentric-ring triangulations, annulus meshes structured polar grids),
and boundary vertices lie exactly on the boundary curve at every level.

Boundary components follow the orientation convention that the tangent
``tau`` runs with the interior on its left, i.e. ``(tau, nu)`` is a direct
frame with ``nu`` the inward normal: the outer component is traversed
counterclockwise, holes clockwise.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class BoundaryLoop:
    """One oriented boundary component of a mesh."""

    nodes: np.ndarray        # ordered node indices, loop implied closed
    edges: np.ndarray        # (ne, 2) directed edges, interior on the left
    edge_tri: np.ndarray     # owner triangle per edge
    s_nodes: np.ndarray      # arclength parameter of each node
    s_mid: np.ndarray        # arclength parameter of edge midpoints
    edge_len: np.ndarray     # straight edge lengths (mesh quadrature weights)
    length: float            # exact component length when known, else polygonal
    kappa_mid: np.ndarray    # curvature at edge midpoints
    is_outer: bool = True


@dataclass
class Mesh:
    nodes: np.ndarray                  # (nn, 2)
    tris: np.ndarray                   # (nt, 3) CCW
    loops: List[BoundaryLoop] = field(default_factory=list)
    level: int = 0

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_tris(self):
        return self.tris.shape[0]

    def areas(self):
        x, y = self.nodes[:, 0], self.nodes[:, 1]
        t = self.tris
        return 0.5 * (
            (x[t[:, 1]] - x[t[:, 0]]) * (y[t[:, 2]] - y[t[:, 0]])
            - (x[t[:, 2]] - x[t[:, 0]]) * (y[t[:, 1]] - y[t[:, 0]])
        )

    def quad_points(self):
        """Edge midpoints per triangle, point q opposite local vertex q: (nt, 3, 2)."""
        p = self.nodes[self.tris]  # (nt, 3, 2)
        return np.stack(
            [
                0.5 * (p[:, 1] + p[:, 2]),
                0.5 * (p[:, 0] + p[:, 2]),
                0.5 * (p[:, 0] + p[:, 1]),
            ],
            axis=1,
        )

    def centroids(self):
        return self.nodes[self.tris].mean(axis=1)

    def boundary_node_set(self):
        out = set()
        for lp in self.loops:
            out.update(int(i) for i in lp.nodes)
        return out


# ---------------------------------------------------------------------------
# boundary extraction


def _directed_boundary_edges(tris):
    """Directed boundary edges (i, j) with owner triangle, interior on the left."""
    edges = {}
    for t, (a, b, c) in enumerate(tris):
        for i, j in ((a, b), (b, c), (c, a)):
            edges[(int(i), int(j))] = t
    out = []
    for (i, j), t in edges.items():
        if (j, i) not in edges:
            out.append((i, j, t))
    return out


def _chain_loops(bedges):
    nxt = {}
    owner = {}
    for i, j, t in bedges:
        nxt[i] = j
        owner[(i, j)] = t
    loops = []
    seen = set()
    for i, _, _ in bedges:
        if i in seen:
            continue
        loop = [i]
        seen.add(i)
        j = nxt[i]
        while j != i:
            loop.append(j)
            seen.add(j)
            j = nxt[j]
        loops.append(loop)
    return loops, owner


def _loop_signed_area(nodes, loop):
    p = nodes[loop]
    x, y = p[:, 0], p[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * np.sum(x * yn - xn * y)


def extract_boundary(nodes, tris, geom=None):
    """Build BoundaryLoop records; `geom` supplies exact parametrizations."""
    bedges = _directed_boundary_edges(tris)
    raw_loops, owner = _chain_loops(bedges)
    recs = []
    for loop in raw_loops:
        area = _loop_signed_area(nodes, loop)
        # deterministic start: node of maximal x (break ties by y)
        p = nodes[loop]
        k = int(np.lexsort((p[:, 1], p[:, 0]))[-1])
        loop = loop[k:] + loop[:k]
        arr = np.asarray(loop, dtype=np.int64)
        edges = np.stack([arr, np.roll(arr, -1)], axis=1)
        etri = np.asarray([owner[(int(i), int(j))] for i, j in edges], dtype=np.int64)
        recs.append((arr, edges, etri, area > 0))
    # outer loop first, holes after (sorted by |area| descending for determinism)
    recs.sort(key=lambda r: (not r[3], -abs(_loop_signed_area(nodes, list(r[0])))))
    out = []
    for jc, (arr, edges, etri, is_outer) in enumerate(recs):
        pe = nodes[edges[:, 0]]
        qe = nodes[edges[:, 1]]
        elen = np.hypot(*(qe - pe).T)
        if geom is not None:
            s_nodes, s_mid, length, kap = geom.parametrize(jc, nodes, arr, edges)
        else:
            s_nodes = np.concatenate([[0.0], np.cumsum(elen)[:-1]])
            length = float(np.sum(elen))
            s_mid = s_nodes + 0.5 * elen
            kap = _discrete_curvature(nodes, arr, elen)
        out.append(
            BoundaryLoop(
                nodes=arr, edges=edges, edge_tri=etri, s_nodes=s_nodes,
                s_mid=s_mid, edge_len=elen, length=length, kappa_mid=kap,
                is_outer=is_outer,
            )
        )
    return out


def _discrete_curvature(nodes, loop, elen):
    """Turning-angle curvature estimate at edge midpoints."""
    p = nodes[loop]
    d = np.roll(p, -1, axis=0) - p
    ang = np.arctan2(d[:, 1], d[:, 0])
    turn = np.diff(np.concatenate([ang, ang[:1]]))
    turn = (turn + np.pi) % (2 * np.pi) - np.pi
    ds = 0.5 * (elen + np.roll(elen, -1))
    kap_nodes = turn / ds  # curvature at the node between edge e and e+1
    return 0.5 * (kap_nodes + np.roll(kap_nodes, 1))


# ---------------------------------------------------------------------------
# structured meshes


def disc_mesh(R, rings):
    """Concentric-ring triangulation of D(0,R): ring k holds 6k nodes."""
    K = int(rings)
    nodes = [(0.0, 0.0)]
    ring_start = [None]
    for k in range(1, K + 1):
        ring_start.append(len(nodes))
        rk = R * k / K
        ang = 2 * np.pi * np.arange(6 * k) / (6 * k)
        nodes.extend(zip(rk * np.cos(ang), rk * np.sin(ang)))
    tris = []
    for k in range(1, K + 1):
        no, ni = 6 * k, 6 * (k - 1)
        ob, ib = ring_start[k], (ring_start[k - 1] if k > 1 else 0)
        if k == 1:
            for j in range(6):
                tris.append((0, ob + j, ob + (j + 1) % 6))
            continue
        for s in range(6):
            for t in range(k):
                o1 = ob + (s * k + t) % no
                o2 = ob + (s * k + t + 1) % no
                i1 = ib + (s * (k - 1) + t) % ni
                tris.append((o1, o2, i1))
                if t < k - 1:
                    i2 = ib + (s * (k - 1) + t + 1) % ni
                    tris.append((i1, o2, i2))
    nodes = np.asarray(nodes, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int64)
    a = _areas(nodes, tris)
    tris[a < 0] = tris[a < 0][:, [0, 2, 1]]
    return nodes, tris


def annulus_mesh(R_in, R_out, n_radial, n_theta):
    """Structured polar grid on the annulus, quads split into triangles."""
    K, N = int(n_radial), int(n_theta)
    r = np.linspace(R_in, R_out, K + 1)
    th = 2 * np.pi * np.arange(N) / N
    rr, tt = np.meshgrid(r, th, indexing="ij")
    nodes = np.stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()], axis=1)
    tris = []
    for i in range(K):
        for j in range(N):
            a = i * N + j
            b = (i + 1) * N + j
            c = (i + 1) * N + (j + 1) % N
            d = i * N + (j + 1) % N
            tris.append((a, b, c))
            tris.append((a, c, d))
    tris = np.asarray(tris, dtype=np.int64)
    a = _areas(nodes, tris)
    tris[a < 0] = tris[a < 0][:, [0, 2, 1]]
    return nodes, tris


def _areas(nodes, tris):
    x, y = nodes[:, 0], nodes[:, 1]
    t = tris
    return 0.5 * (
        (x[t[:, 1]] - x[t[:, 0]]) * (y[t[:, 2]] - y[t[:, 0]])
        - (x[t[:, 2]] - x[t[:, 0]]) * (y[t[:, 1]] - y[t[:, 0]])
    )


# ---------------------------------------------------------------------------
# domain specifications


class _CircleGeom:
    """Exact arclength/curvature for concentric-circle boundaries."""

    def __init__(self, radii_cw):
        # list of (radius, clockwise?) per component index
        self.radii_cw = radii_cw

    def parametrize(self, jc, nodes, loop, edges):
        Rj, cw = self.radii_cw[jc]
        th = np.arctan2(nodes[loop, 1], nodes[loop, 0]) % (2 * np.pi)
        if cw:
            s_nodes = Rj * ((2 * np.pi - th) % (2 * np.pi))
        else:
            s_nodes = Rj * th
        s_nodes[0] = 0.0
        mid = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
        thm = np.arctan2(mid[:, 1], mid[:, 0]) % (2 * np.pi)
        s_mid = Rj * ((2 * np.pi - thm) % (2 * np.pi)) if cw else Rj * thm
        L = 2 * np.pi * Rj
        kap = np.full(edges.shape[0], (-1.0 if cw else 1.0) / Rj)
        return s_nodes, s_mid, L, kap


class _MappedGeom:
    """Arclength/curvature for the image of the unit circle under a map."""

    def __init__(self, cmap, R, n=8192):
        self.cmap = cmap
        self.R = R
        th = 2 * np.pi * np.arange(n) / n
        z = R * np.exp(1j * th)
        speed = np.abs(cmap.derivative(z)) * R
        # cumulative arclength along theta by trapezoid on the periodic grid
        ds = 2 * np.pi / n * speed
        s = np.concatenate([[0.0], np.cumsum(ds)])
        self.theta_grid = np.concatenate([th, [2 * np.pi]])
        self.s_grid = s
        self.length_exact = float(s[-1])

    def s_of_theta(self, theta):
        theta = np.asarray(theta) % (2 * np.pi)
        return np.interp(theta, self.theta_grid, self.s_grid)

    def kappa_of_theta(self, theta):
        z = self.R * np.exp(1j * np.asarray(theta))
        fp = self.cmap.derivative(z)
        fpp = self.cmap.second_derivative(z)
        wp = 1j * z * fp
        wpp = -z * fp - z * z * fpp
        return np.imag(wpp * np.conj(wp)) / np.abs(wp) ** 3

    def parametrize(self, jc, nodes, loop, edges):
        # arclength origin is the image of preimage angle 0, independent of
        # which node the loop extraction happens to start from
        th_nodes = self._preimage_theta[loop]
        s_nodes = self.s_of_theta(th_nodes)
        # midpoints: average preimage angles along each edge (mod 2 pi)
        th_a = self._preimage_theta[edges[:, 0]]
        th_b = self._preimage_theta[edges[:, 1]]
        dth = (th_b - th_a + np.pi) % (2 * np.pi) - np.pi
        th_m = (th_a + 0.5 * dth) % (2 * np.pi)
        s_mid = self.s_of_theta(th_m)
        return s_nodes, s_mid, self.length_exact, self.kappa_of_theta(th_m)


@dataclass(frozen=True)
class DomainSpec:
    kind: str  # 'disc' | 'annulus' | 'mapped'
    R: float = 1.0
    R_in: float = 0.0
    R_out: float = 1.0
    cmap: Optional[object] = None  # conformal map (see conformal.ConformalMap)
    base_rings: int = 2
    base_radial: int = 1
    base_theta: int = 12

    @staticmethod
    def disc(R=1.0, base_rings=2):
        if R <= 0:
            raise ValueError("disc radius must be positive")
        return DomainSpec(kind="disc", R=float(R), base_rings=base_rings)

    @staticmethod
    def annulus(R_in, R_out, base_radial=1, base_theta=12):
        if not (0 < R_in < R_out):
            raise ValueError("annulus needs 0 < R_in < R_out")
        return DomainSpec(kind="annulus", R_in=float(R_in), R_out=float(R_out),
                          base_radial=base_radial, base_theta=base_theta)

    @staticmethod
    def mapped_disc(cmap, R=1.0, base_rings=2):
        return DomainSpec(kind="mapped", R=float(R), cmap=cmap, base_rings=base_rings)

    @property
    def n_components(self):
        return 2 if self.kind == "annulus" else 1

    @property
    def d(self):
        return self.n_components - 1

    @property
    def is_radial(self):
        return self.kind in ("disc", "annulus")

    def component_lengths(self):
        if self.kind == "disc":
            return [2 * np.pi * self.R]
        if self.kind == "annulus":
            return [2 * np.pi * self.R_out, 2 * np.pi * self.R_in]
        return [_MappedGeom(self.cmap, self.R).length_exact]

    def area(self):
        if self.kind == "disc":
            return np.pi * self.R**2
        if self.kind == "annulus":
            return np.pi * (self.R_out**2 - self.R_in**2)
        # contour formula: |Omega| = (1/2) oint Im(conj(w) dw)
        n = 8192
        th = 2 * np.pi * np.arange(n) / n
        z = self.R * np.exp(1j * th)
        w = self.cmap.apply(z)
        wp = 1j * z * self.cmap.derivative(z)
        return float(0.5 * np.mean(np.imag(np.conj(w) * wp)) * 2 * np.pi)

    def mesh(self, level):
        """Mesh at refinement `level` (each level doubles linear resolution)."""
        if level < 0:
            raise ValueError("mesh level must be >= 0")
        scale = 2**level
        if self.kind == "disc":
            nodes, tris = disc_mesh(self.R, self.base_rings * scale)
            geom = _CircleGeom([(self.R, False)])
            loops = extract_boundary(nodes, tris, geom)
        elif self.kind == "annulus":
            nodes, tris = annulus_mesh(
                self.R_in, self.R_out, self.base_radial * scale, self.base_theta * scale
            )
            geom = _CircleGeom([(self.R_out, False), (self.R_in, True)])
            loops = extract_boundary(nodes, tris, geom)
        else:
            dnodes, tris = disc_mesh(self.R, self.base_rings * scale)
            theta = np.arctan2(dnodes[:, 1], dnodes[:, 0]) % (2 * np.pi)
            z = dnodes[:, 0] + 1j * dnodes[:, 1]
            w = self.cmap.apply(z)
            nodes = np.stack([w.real, w.imag], axis=1)
            a = _areas(nodes, tris)
            if np.any(a <= 0):
                raise ValueError("conformal image mesh is tangled (map not univalent?)")
            geom = _MappedGeom(self.cmap, self.R)
            geom._preimage_theta = theta
            loops = extract_boundary(nodes, tris, geom)
        m = Mesh(nodes=nodes, tris=tris, loops=loops, level=level)
        if np.any(m.areas() <= 0):
            raise ValueError("mesh has non-positive triangle areas")
        return m


# ---------------------------------------------------------------------------
# plain-text mesh exchange format


def write_mesh_text(mesh, path_or_buf):
    """Write `nodes / triangles` in a simple whitespace format."""
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf, "w")
        close = True
    else:
        f = path_or_buf
    try:
        f.write("magcount-mesh 1\n")
        f.write(f"{mesh.n_nodes} {mesh.n_tris}\n")
        for x, y in mesh.nodes:
            f.write(f"{x!r} {y!r}\n")
        for a, b, c in mesh.tris:
            f.write(f"{a} {b} {c}\n")
    finally:
        if close:
            f.close()


def read_mesh_text(path_or_buf):
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf)
        close = True
    else:
        f = path_or_buf
    try:
        header = f.readline().split()
        if header[:1] != ["magcount-mesh"]:
            raise ValueError("not a magcount mesh file")
        nn, nt = map(int, f.readline().split())
        nodes = np.array([[float(v) for v in f.readline().split()] for _ in range(nn)])
        tris = np.array([[int(v) for v in f.readline().split()] for _ in range(nt)], dtype=np.int64)
    finally:
        if close:
            f.close()
    loops = extract_boundary(nodes, tris, None)
    return Mesh(nodes=nodes, tris=tris, loops=loops, level=0)
