"""Geodesics: closed-form constructions and a grid shortest-path solver.

The solver runs Dijkstra on a uniform lattice (16-neighbour stencil), then
shortcuts the lattice path and relaxes its vertices with L-BFGS on the
discretised length functional. Relaxation moves vertices continuously and
rejects any step that would leave the domain, so it never changes the
homotopy class found on the lattice.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .domains import Domain, DomainError
from .geom import Annulus, GeometryError, PathPolyline, as_point, as_vertices, first_in_closure
from .metrics import (DensityInterval, H, K, MetricKind, closed_form_distance, cstar_k,
                      density_function, dstar_h, fixed_quadrature, gehring_palka_lower,
                      integrate, path_length)

log = logging.getLogger(__name__)

STENCIL_8 = ((1, 0), (0, 1), (1, 1), (1, -1))
STENCIL_16 = STENCIL_8 + ((1, 2), (2, 1), (1, -2), (2, -1))


class SolverResolutionError(RuntimeError):
    """The lattice could not resolve a path between the endpoints."""


@dataclass(frozen=True)
class SolverParams:
    initial_spacing: float | None = None   # None: box size / cells_across
    refine_factor: float = 0.5
    max_refinements: int = 2
    boundary_margin_cells: int = 2
    neighbor_stencil: int = 16
    convergence_rel_tol: float = 1e-3
    cells_across: int = 30
    relax: bool = True
    relax_vertices: tuple[int, int] = (24, 64)
    max_nodes: int = 400_000

    def __post_init__(self):
        if self.initial_spacing is not None and not self.initial_spacing > 0:
            raise ValueError("initial_spacing must be positive")
        if not 0 < self.refine_factor < 1:
            raise ValueError("refine_factor must lie in (0, 1)")
        if self.max_refinements < 0 or self.boundary_margin_cells < 1:
            raise ValueError("max_refinements >= 0 and boundary_margin_cells >= 1 required")
        if self.neighbor_stencil not in (8, 16):
            raise ValueError("neighbor_stencil must be 8 or 16")
        if not self.convergence_rel_tol >= 1e-6:
            raise ValueError("convergence_rel_tol must be >= 1e-6")
        if self.cells_across < 4:
            raise ValueError("cells_across must be >= 4")

    def refined(self, levels: int = 1) -> "SolverParams":
        """Same parameters one lattice level finer."""
        return replace(self, cells_across=int(round(self.cells_across / self.refine_factor ** levels)),
                       initial_spacing=None if self.initial_spacing is None
                       else self.initial_spacing * self.refine_factor ** levels)


@dataclass
class GeodesicResult:
    path: PathPolyline
    length: float | DensityInterval
    method: str
    grid_spacing: float | None = None
    chordarc_lambda: float | None = None
    length_interval: DensityInterval | None = None
    upper_path: PathPolyline | None = None
    lower_bound: float | None = None
    history: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.length if isinstance(self.length, float) else self.length.lower

    def to_dict(self) -> dict:
        length = self.length.to_dict() if isinstance(self.length, DensityInterval) else self.length
        return {
            "length": length,
            "method": self.method,
            "grid_spacing": self.grid_spacing,
            "lower_bound": self.lower_bound,
            "vertices": len(self.path),
            "refinement_history": self.history,
        }


# ----------------------------------------------------------------------
# lattice
# ----------------------------------------------------------------------

class Lattice:
    """Valid lattice nodes and weighted edges for one spacing."""

    def __init__(self, dom: Domain, fn, box, h: float, margin: int, stencil: int,
                 max_nodes: int, which: int = 0):
        self.dom, self.fn, self.h, self.which = dom, fn, h, which
        x0, x1, y0, y1 = box
        nx = int(math.ceil((x1 - x0) / h)) + 1
        ny = int(math.ceil((y1 - y0) / h)) + 1
        if nx * ny > max_nodes:
            raise SolverResolutionError(f"lattice of {nx}x{ny} nodes exceeds max_nodes={max_nodes}")
        X = x0 + h * np.arange(nx)
        Y = y0 + h * np.arange(ny)
        Z = X[None, :] + 1j * Y[:, None]
        valid = dom.delta_many(Z) >= margin * h
        ids = np.full(Z.shape, -1, dtype=np.int64)
        ids[valid] = np.arange(int(valid.sum()))
        self.nodes = Z[valid]
        self.ids, self.X0, self.Y0, self.nx, self.ny = ids, x0, y0, nx, ny
        rows, cols, wts = [], [], []
        offsets = STENCIL_16 if stencil == 16 else STENCIL_8
        for di, dj in offsets:
            # node (r, c) -> (r + dj, c + di)
            r0, r1 = max(0, -dj), ny - max(0, dj)
            c0, c1 = max(0, -di), nx - max(0, di)
            if r1 <= r0 or c1 <= c0:
                continue
            a_ids = ids[r0:r1, c0:c1]
            b_ids = ids[r0 + dj:r1 + dj, c0 + di:c1 + di]
            ok = (a_ids >= 0) & (b_ids >= 0)
            if not ok.any():
                continue
            p = Z[r0:r1, c0:c1][ok]
            q = Z[r0 + dj:r1 + dj, c0 + di:c1 + di][ok]
            w = self._weights(p, q, pieces=1)
            good = np.isfinite(w) & (dom.segment_clearance(p, q) > 0)
            rows.append(a_ids[ok][good])
            cols.append(b_ids[ok][good])
            wts.append(w[good])
        self.rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
        self.cols = np.concatenate(cols) if cols else np.zeros(0, np.int64)
        self.wts = np.concatenate(wts) if wts else np.zeros(0)

    def _weights(self, p, q, pieces: int) -> np.ndarray:
        if pieces == 1:
            mid = 0.5 * (p + q)
            return self.fn(mid)[self.which] * np.abs(q - p)
        total = np.zeros(p.shape)
        for k in range(pieces):
            s0, s1 = k / pieces, (k + 1) / pieces
            total = total + fixed_quadrature(lambda z: self.fn(z)[self.which],
                                             p + s0 * (q - p), p + s1 * (q - p))
        return total

    def attachments(self, pts: np.ndarray, radius_cells: float):
        """Edges from extra points (ids N, N+1, ...) to nearby nodes."""
        N = self.nodes.size
        rows, cols, wts = [], [], []
        rc = radius_cells * self.h
        for k, z in enumerate(pts):
            ci = int(round((z.real - self.X0) / self.h))
            ri = int(round((z.imag - self.Y0) / self.h))
            span = int(math.ceil(radius_cells)) + 1
            r0, r1 = max(0, ri - span), min(self.ny, ri + span + 1)
            c0, c1 = max(0, ci - span), min(self.nx, ci + span + 1)
            if r1 <= r0 or c1 <= c0:
                continue
            sub = self.ids[r0:r1, c0:c1]
            cand = sub[sub >= 0]
            if cand.size == 0:
                continue
            q = self.nodes[cand]
            near = np.abs(q - z) <= rc
            cand, q = cand[near], q[near]
            if cand.size == 0:
                continue
            p = np.full(q.shape, z)
            ok = self.dom.segment_clearance(p, q) > 0
            cand, q, p = cand[ok], q[ok], p[ok]
            if cand.size == 0:
                continue
            w = self._weights(p, q, pieces=4)
            good = np.isfinite(w)
            rows.append(np.full(int(good.sum()), N + k))
            cols.append(cand[good])
            wts.append(w[good])
        if not rows:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)

    def graph(self, pts: np.ndarray, radius_cells: float, direct_pairs=()):
        ar, ac, aw = self.attachments(pts, radius_cells)
        rows = [self.rows, ar]
        cols = [self.cols, ac]
        wts = [self.wts, aw]
        N = self.nodes.size
        pairs = np.asarray(direct_pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            p, q = pts[pairs[:, 0]], pts[pairs[:, 1]]
            ok = self.dom.segment_clearance(p, q) > 0
            w = self._weights(p[ok], q[ok], pieces=8)
            good = np.isfinite(w)
            rows.append(N + pairs[ok, 0][good])
            cols.append(N + pairs[ok, 1][good])
            wts.append(w[good])
        n = N + len(pts)
        r, c, w = np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)
        # zero-weight edges vanish in sparse storage
        w = np.maximum(w, 1e-300)
        return coo_matrix((w, (r, c)), shape=(n, n)).tocsr(), np.concatenate([self.nodes, pts])


def _box(a: complex, b: complex, pad: float):
    return (min(a.real, b.real) - pad, max(a.real, b.real) + pad,
            min(a.imag, b.imag) - pad, max(a.imag, b.imag) + pad)


def _lattice_path(dom, fn, which, a, b, h, params, box):
    lat = Lattice(dom, fn, box, h, params.boundary_margin_cells, params.neighbor_stencil,
                  params.max_nodes, which)
    pts = np.array([a, b])
    G, allpts = lat.graph(pts, params.boundary_margin_cells + 2.5, direct_pairs=[(0, 1)])
    src, dst = lat.nodes.size, lat.nodes.size + 1
    dist, pred = dijkstra(G, directed=False, indices=src, return_predecessors=True)
    if not np.isfinite(dist[dst]):
        return None
    order = [dst]
    while order[-1] != src:
        order.append(pred[order[-1]])
    return allpts[np.array(order[::-1])]


# ----------------------------------------------------------------------
# post-processing
# ----------------------------------------------------------------------

def _seg_lengths(fn, which, v: np.ndarray, pieces: int = 2) -> np.ndarray:
    p0, p1 = v[:-1], v[1:]
    total = np.zeros(p0.size)
    for k in range(pieces):
        s0, s1 = k / pieces, (k + 1) / pieces
        total = total + fixed_quadrature(lambda z: fn(z)[which], p0 + s0 * (p1 - p0), p0 + s1 * (p1 - p0))
    return total


def shortcut(dom: Domain, fn, which: int, v: np.ndarray, window: int = 8) -> np.ndarray:
    """Greedy shortcutting: jump ahead whenever a direct segment is shorter and stays inside."""
    v = np.asarray(v, dtype=complex)
    seg = _seg_lengths(fn, which, v)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    out = [v[0]]
    i = 0
    n = v.size
    while i < n - 1:
        js = np.arange(i + 2, min(n, i + window + 1))
        nxt = i + 1
        if js.size:
            p0 = np.full(js.size, v[i])
            p1 = v[js]
            ok = dom.segment_clearance(p0, p1) > 0
            direct = np.full(js.size, np.inf)
            if ok.any():
                d = np.zeros(int(ok.sum()))
                q0, q1 = p0[ok], p1[ok]
                for k in range(4):
                    s0, s1 = k / 4, (k + 1) / 4
                    d = d + fixed_quadrature(lambda z: fn(z)[which], q0 + s0 * (q1 - q0), q0 + s1 * (q1 - q0))
                direct[ok] = d
            better = direct <= (cum[js] - cum[i]) * (1 + 1e-12)
            if better.any():
                nxt = int(js[np.nonzero(better)[0][-1]])
        out.append(v[nxt])
        i = nxt
    return np.array(out)


def _resample(fn, which, v: np.ndarray, n: int) -> np.ndarray:
    seg = integrate(lambda z: fn(z)[which], v, 1e-6, per_segment=True)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, cum[-1], n)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, v.size - 2)
    frac = np.where(seg[idx] > 0, (targets - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1), 0.0)
    out = v[idx] + np.clip(frac, 0, 1) * (v[idx + 1] - v[idx])
    out[0], out[-1] = v[0], v[-1]
    keep = np.ones(out.size, dtype=bool)
    keep[1:] = np.abs(np.diff(out)) > 0
    return out[keep]


def relax(dom: Domain, fn, which: int, v: np.ndarray, maxiter: int = 80) -> np.ndarray:
    """Minimise the 8-point discretised length over interior vertex positions."""
    v = np.asarray(v, dtype=complex)
    n = v.size
    if n <= 2:
        return v
    m = n - 2
    big = 1e300

    def unpack(x):
        w = v.copy()
        w[1:-1] = x[:m] + 1j * x[m:]
        return w

    def fg(x):
        w = unpack(x)
        p0, p1 = w[:-1], w[1:]
        if np.any(dom.segment_clearance(p0, p1) <= 0):
            return big, np.zeros_like(x)
        sl = np.abs(p1 - p0)
        eps = np.zeros(n)
        eps[1:-1] = 1e-7 * np.minimum(sl[:-1], sl[1:])
        e0, e1 = eps[:-1], eps[1:]
        starts = np.concatenate([p0, p0, p0 + e0, p0, p0 + 1j * e0])
        ends = np.concatenate([p1, p1 + e1, p1, p1 + 1j * e1, p1])
        S = fixed_quadrature(lambda z: fn(z)[which], starts, ends).reshape(5, n - 1)
        if not np.all(np.isfinite(S)):
            return big, np.zeros_like(x)
        s0 = S[0]
        e = eps[1:-1]
        gx = (S[1, :-1] - s0[:-1] + S[2, 1:] - s0[1:]) / e
        gy = (S[3, :-1] - s0[:-1] + S[4, 1:] - s0[1:]) / e
        return float(s0.sum()), np.concatenate([gx, gy])

    x0 = np.concatenate([v[1:-1].real, v[1:-1].imag])
    f0, _ = fg(x0)
    if f0 >= big:
        return v
    res = minimize(fg, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": maxiter, "ftol": 1e-11, "gtol": 1e-9})
    x = res.x if res.fun < f0 else x0
    w = unpack(x)
    return w if dom.path_inside(w) else v


# ----------------------------------------------------------------------
# solver
# ----------------------------------------------------------------------

def _polish(dom, fn, which, raw: np.ndarray, params: SolverParams) -> np.ndarray:
    v = shortcut(dom, fn, which, raw)
    if not params.relax:
        return v
    seg = _seg_lengths(fn, which, v)
    lo, hi = params.relax_vertices
    n = int(np.clip(16 + 12 * seg.sum(), lo, hi))
    r = _resample(fn, which, v, n)
    if not dom.path_inside(r):
        r = v
    return relax(dom, fn, which, r)


def _solve_one(dom, fn, which, a, b, params: SolverParams):
    da, db = dom.delta(a), dom.delta(b)
    pad = 2.0 * max(da, db)
    box = _box(a, b, pad)
    span = max(box[1] - box[0], box[3] - box[2])
    h = params.initial_spacing or span / params.cells_across
    history = []
    best = None
    prev = None
    for level in range(params.max_refinements + 1):
        raw = _lattice_path(dom, fn, which, a, b, h, params, box)
        if raw is None:
            log.debug("no lattice path at spacing %g", h)
            h *= params.refine_factor
            continue
        v = _polish(dom, fn, which, raw, params)
        length = integrate(lambda z: fn(z)[which], v, dom=dom)
        history.append({"spacing": h, "length": length})
        if best is None or length <= best[1]:
            best = (v, length, h)
        if prev is not None and abs(length - prev) <= params.convergence_rel_tol * length:
            break
        prev = length
        h *= params.refine_factor
    if best is None:
        raise SolverResolutionError("no lattice path between the endpoints at any refinement level")
    return best[0], best[1], best[2], history


def solve_geodesic(dom: Domain, metric, a, b, params: SolverParams | None = None) -> GeodesicResult:
    """Numerical geodesic between a and b."""
    params = params or SolverParams()
    metric = MetricKind.parse(metric)
    a, b = dom.require(a), dom.require(b)
    if a == b:
        raise DomainError("endpoints coincide")
    fn, exact = density_function(dom, metric)
    v, length, h, hist = _solve_one(dom, fn, 0, a, b, params)
    path = PathPolyline(v)
    lower_bound = closed_form_distance(dom, metric, a, b)
    if lower_bound is None and metric is K:
        lower_bound = gehring_palka_lower(dom, a, b)
    if exact:
        return GeodesicResult(path, length, "grid", h, None, DensityInterval(length, length, True),
                              None, lower_bound, hist)
    try:
        vu, lu, _, hist_u = _solve_one(dom, fn, 1, a, b, params)
        upper_path = PathPolyline(vu)
    except SolverResolutionError:
        lu, upper_path, hist_u = math.inf, None, []
    iv = DensityInterval(length, max(lu, length), False)
    return GeodesicResult(path, iv, "grid", h, None, iv, upper_path, lower_bound,
                          hist + [dict(d, density="upper") for d in hist_u])


# ----------------------------------------------------------------------
# exact geodesics
# ----------------------------------------------------------------------

EXACT_SAMPLES = 513


def spiral_points(a: complex, b: complex, n: int = EXACT_SAMPLES, center: complex = 0j) -> np.ndarray:
    w = cmath.log((b - center) / (a - center))
    t = np.linspace(0.0, 1.0, n)
    return center + (a - center) * np.exp(t * w)


def spiral_length(a, b, center=0j) -> float:
    """Euclidean length of the log spiral from a to b about center."""
    a, b = as_point(a) - center, as_point(b) - center
    w = cmath.log(b / a)
    lr = w.real
    if abs(lr) < 1e-12:
        return abs(w) * abs(a)
    return abs(w) * abs(a) * math.expm1(lr) / lr


def _disk_geodesic_points(a: complex, b: complex, n: int) -> np.ndarray:
    wb = (b - a) / (1 - a.conjugate() * b)
    dist = 2 * math.atanh(abs(wb))
    s = np.linspace(0.0, dist, n)
    w = np.tanh(s / 2) * (wb / abs(wb))
    return (w + a) / (1 + a.conjugate() * w)


def _uhp_geodesic(z1: complex, z2: complex, n: int) -> np.ndarray:
    """Geodesic in the upper half-plane, sampled uniformly in hyperbolic arclength."""
    if abs(z1.real - z2.real) <= 1e-15 * (abs(z1) + abs(z2)):
        s = np.linspace(0.0, math.log(z2.imag / z1.imag), n)
        return z1.real + 1j * z1.imag * np.exp(s)
    c = (abs(z2) ** 2 - abs(z1) ** 2) / (2 * (z2.real - z1.real))
    R = abs(z1 - c)
    phi1, phi2 = cmath.phase(z1 - c), cmath.phase(z2 - c)
    s1, s2 = -math.log(math.tan(phi1 / 2)), -math.log(math.tan(phi2 / 2))
    s = np.linspace(s1, s2, n)
    phi = 2 * np.arctan(np.exp(-s))
    return c + R * np.exp(1j * phi)


def _dstar_geodesic_points(a: complex, b: complex, n: int) -> np.ndarray:
    w1 = cmath.log(a)
    w2 = cmath.log(b)
    from .metrics import _halfplane_dist, DECK_SHIFTS
    k = min(range(-DECK_SHIFTS, DECK_SHIFTS + 1),
            key=lambda k: (_halfplane_dist(w1, w2 + 2j * math.pi * k), abs(k)))
    w2 = w2 + 2j * math.pi * k
    z = _uhp_geodesic(-1j * w1, -1j * w2, n)
    return np.exp(1j * z)


def exact_geodesic(dom: Domain, metric, a, b, n: int = EXACT_SAMPLES) -> GeodesicResult | None:
    metric = MetricKind.parse(metric)
    a, b = dom.require(a), dom.require(b)
    if a == b:
        return None
    name = dom.model_name
    pts = None
    if metric is K and name == "punctured_plane":
        o = as_point(dom.model.param("center", 0.0))
        pts = spiral_points(a, b, n, o)
    elif metric is H and name == "unit_disk":
        pts = _disk_geodesic_points(a, b, n)
    elif metric is H and name in ("punctured_unit_disk", "punctured_disk"):
        o = as_point(dom.model.param("center", 0.0))
        R = float(dom.model.param("R", 1.0))
        pts = o + R * _dstar_geodesic_points((a - o) / R, (b - o) / R, n)
    if pts is None:
        return None
    pts[0], pts[-1] = a, b
    path = PathPolyline.dedup(pts)
    d = closed_form_distance(dom, metric, a, b)
    return GeodesicResult(path, d, "exact", None, 1.0, DensityInterval(d, d, True), None, d)


def geodesic(dom: Domain, metric, a, b, params: SolverParams | None = None) -> GeodesicResult:
    """Exact geodesic when available, otherwise the numerical one."""
    return exact_geodesic(dom, metric, a, b) or solve_geodesic(dom, metric, a, b, params)


# ----------------------------------------------------------------------
# circular-arc-segment paths and chordarc surgery
# ----------------------------------------------------------------------

ARC_STEP = math.pi / 180


def _arc(center: complex, p: complex, angle: float) -> np.ndarray:
    steps = max(int(math.ceil(abs(angle) / ARC_STEP)), 1)
    t = np.linspace(0.0, angle, steps + 1)
    return center + (p - center) * np.exp(1j * t)


def _arc_angle(p: complex, q: complex, center: complex) -> float:
    ang = cmath.phase((q - center) / (p - center))
    return math.pi if ang == -math.pi else ang


def chi_path(a, b, center=0j) -> PathPolyline:
    """Shorter arc from a to the radial projection c of b, then the segment [c, b]."""
    a, b, center = as_point(a), as_point(b), as_point(center)
    ra, rb = abs(a - center), abs(b - center)
    if ra == 0 or rb == 0 or ra > rb * (1 + 1e-15):
        raise GeometryError("need 0 < |a - center| <= |b - center|")
    ang = _arc_angle(a, b, center)
    pts = list(_arc(center, a, ang)) if ang != 0 else [a]
    c = center + (ra / rb) * (b - center) if ang != 0 else a
    pts[-1] = c
    if abs(b - c) > 0:
        pts.append(b)
    if len(pts) == 1:
        raise GeometryError("a and b coincide")
    return PathPolyline.dedup(pts)


def chi_length(a, b, center=0j) -> float:
    a, b, center = as_point(a), as_point(b), as_point(center)
    ra, rb = abs(a - center), abs(b - center)
    return ra * abs(_arc_angle(a, b, center)) + (rb - ra)


def surgery_bound(lam: float, modulus: float) -> float:
    """Chordarc constant guaranteed after pruning into an annulus of the given modulus."""
    return 3 * lam + (2 * math.pi / modulus) * (lam + 1) + 2


def _admissible_surgery_annulus(dom: Domain, ann: Annulus) -> bool:
    eps, big = 0.0, math.inf
    for lo, hi, _ in dom.radial_extents(ann.center):
        if hi <= ann.inner_radius * (1 + 1e-12):
            eps = max(eps, hi)
        elif lo >= ann.outer_radius * (1 - 1e-12):
            big = min(big, lo)
        else:
            return False
    return 2 * eps < ann.inner_radius and 2 * ann.outer_radius < big


def prune_chordarc(dom: Domain, alpha, a_ann: Annulus, b) -> PathPolyline:
    """Replace the part of alpha after its first entry into closure(a_ann) by a segment and arc ending at b."""
    alpha = alpha if isinstance(alpha, PathPolyline) else PathPolyline(alpha)
    b = as_point(b)
    if not a_ann.is_proper:
        raise GeometryError("surgery needs a proper annulus")
    if not dom.in_complement(a_ann.center):
        raise GeometryError("annulus center must lie in the complement")
    if not _admissible_surgery_annulus(dom, a_ann):
        raise GeometryError("annulus is not inside the log 2 core of an admissible annulus")
    if a_ann.closure_contains(alpha.start):
        raise GeometryError("alpha must start outside the closed annulus")
    hit = first_in_closure(alpha, a_ann)
    if hit is None:
        raise GeometryError("alpha never meets the annulus")
    s, a = hit
    o = a_ann.center
    ra, rb = abs(a - o), abs(b - o)
    on_inner = abs(ra - a_ann.inner_radius) <= 1e-9 * a_ann.inner_radius
    target = a_ann.outer_radius if on_inner else a_ann.inner_radius
    if abs(rb - target) > 1e-9 * target:
        raise GeometryError("b must lie on the boundary circle opposite the entry point")
    c = o + (rb / ra) * (a - o)
    ang = _arc_angle(c, b, o)
    tail = [a, c]
    if ang != 0:
        tail += list(_arc(o, c, ang)[1:])
        tail[-1] = b
    head = alpha.subpath(0.0, s) if s > 0 else None
    out = PathPolyline.dedup(tail) if head is None else head.concat(PathPolyline.dedup(tail))
    return out


def chordarc_constant(dom: Domain, metric, path, sample_pairs: int = 200, seed: int = 0,
                      params: SolverParams | None = None) -> float:
    """Sampled sup of subpath length over endpoint distance."""
    metric = MetricKind.parse(metric)
    p = path if isinstance(path, PathPolyline) else PathPolyline(path)
    v = p.vertices
    fn, _ = density_function(dom, metric)
    seg = integrate(lambda z: fn(z)[0], v, per_segment=True, dom=dom)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    n = v.size
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(all_pairs) <= sample_pairs:
        pairs = all_pairs
    else:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(all_pairs), size=sample_pairs, replace=False)
        pairs = [all_pairs[k] for k in sorted(pick)]
    worst = 1.0
    cache: dict = {}
    for i, j in pairs:
        x, y = complex(v[i]), complex(v[j])
        ell = cum[j] - cum[i]
        if x == y:
            if ell > 0:
                return math.inf
            continue
        key = (x, y)
        if key not in cache:
            d = closed_form_distance(dom, metric, x, y)
            if d is None:
                d = solve_geodesic(dom, metric, x, y, params).value
            cache[key] = d
        worst = max(worst, ell / cache[key])
    return worst


# ----------------------------------------------------------------------
# multi-source lattice distances
# ----------------------------------------------------------------------

class DistanceField:
    """Lattice distances among a fixed set of points (used for thinness probes)."""

    def __init__(self, dom: Domain, metric, points, params: SolverParams | None = None):
        params = params or SolverParams()
        self.dom, self.params = dom, params
        pts = np.asarray([as_point(z) for z in points], dtype=complex)
        self.points = pts
        self.fn, _ = density_function(dom, metric)
        pad = 2.0 * float(np.max(dom.delta_many(pts)))
        box = (pts.real.min() - pad, pts.real.max() + pad, pts.imag.min() - pad, pts.imag.max() + pad)
        span = max(box[1] - box[0], box[3] - box[2])
        h = params.initial_spacing or span / params.cells_across
        self.spacing = h
        lat = Lattice(dom, self.fn, box, h, params.boundary_margin_cells, params.neighbor_stencil,
                      params.max_nodes)
        radius = params.boundary_margin_cells + 2.5
        # nearby points are linked directly; the lattice alone cannot join them when it is coarse
        gap = np.abs(pts[:, None] - pts[None, :])
        near = np.argwhere(np.triu(gap <= radius * h, 1) | np.triu(gap == 0, 1))
        self.graph, self.nodes = lat.graph(pts, radius, direct_pairs=near)
        self.offset = lat.nodes.size
        self._pred = {}

    def distances(self, src_idx, dst_idx) -> np.ndarray:
        src = self.offset + np.asarray(src_idx)
        dst = self.offset + np.asarray(dst_idx)
        D, P = dijkstra(self.graph, directed=False, indices=src, return_predecessors=True)
        for i, row in zip(np.asarray(src_idx).tolist(), P):
            self._pred[i] = row
        return D[:, dst]

    def polished(self, i: int, j: int) -> float:
        """Length of the lattice path from point i to point j after shortcutting and relaxing."""
        if i not in self._pred:
            self.distances([i], [j])
        pred = self._pred[i]
        src, dst = self.offset + i, self.offset + j
        if src == dst:
            return 0.0
        if pred[dst] < 0:
            return math.inf
        order = [dst]
        while order[-1] != src:
            order.append(pred[order[-1]])
        raw = self.nodes[np.array(order[::-1])]
        v = _polish(self.dom, self.fn, 0, raw, self.params)
        return integrate(lambda z: self.fn(z)[0], v, dom=self.dom)
