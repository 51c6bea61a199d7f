"""Metric densities, path lengths and closed-form distances."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .beta import beta_many
from .domains import Domain, DomainError
from .geom import PathPolyline, as_point, as_vertices

# ----------------------------------------------------------------------
# constants
# ----------------------------------------------------------------------

KAPPA = math.gamma(0.25) ** 4 / (4 * math.pi ** 2)
MU_O = 3 * KAPPA
EPS_O = math.log(1.5)


@dataclass(frozen=True)
class Constants:
    kappa: float = KAPPA
    mu_o: float = MU_O
    eps_o: float = EPS_O


DECK_SHIFTS = 16
QUAD_RTOL = 1e-8
QUAD_MAX_DEPTH = 40
KINK_SAMPLES = 33
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_T = 0.5 * (_GL_X + 1.0)
_GL_W2 = 0.5 * _GL_W


class MetricKind(str, enum.Enum):
    QUASIHYPERBOLIC = "quasihyperbolic"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def parse(cls, s) -> "MetricKind":
        if isinstance(s, cls):
            return s
        key = str(s).lower()
        if key in ("k", "qh", "quasihyperbolic"):
            return cls.QUASIHYPERBOLIC
        if key in ("h", "hyp", "hyperbolic"):
            return cls.HYPERBOLIC
        raise ValueError(f"unknown metric {s!r}")

    @property
    def short(self) -> str:
        return "k" if self is MetricKind.QUASIHYPERBOLIC else "h"


K = MetricKind.QUASIHYPERBOLIC
H = MetricKind.HYPERBOLIC


@dataclass(frozen=True)
class DensityInterval:
    lower: float
    upper: float
    exact: bool

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"interval lower {self.lower} exceeds upper {self.upper}")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float, rtol: float = 0.0) -> bool:
        return self.lower * (1 - rtol) <= x <= self.upper * (1 + rtol)

    def scaled(self, c: float) -> "DensityInterval":
        return DensityInterval(self.lower * c, self.upper * c, self.exact)

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


# ----------------------------------------------------------------------
# densities
# ----------------------------------------------------------------------

DensityFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

EXACT_MODELS = ("unit_disk", "punctured_unit_disk", "punctured_disk", "half_plane",
                "disk_complement", "annulus")


def _exact_hyperbolic(dom: Domain):
    tag = dom.model
    if tag is None or tag.name not in EXACT_MODELS:
        return None
    g = tag.param
    name = tag.name
    if name == "unit_disk":
        return lambda z: 2.0 / (1.0 - np.abs(z) ** 2)
    if name in ("punctured_unit_disk", "punctured_disk"):
        o = as_point(g("center", 0.0))
        R = float(g("R", 1.0))

        def f(z):
            r = np.abs(z - o)
            return 1.0 / (r * np.log(R / r))
        return f
    if name == "disk_complement":
        o = as_point(g("center", 0.0))
        R = float(g("R", 1.0))

        def f(z):
            r = np.abs(z - o)
            return 1.0 / (r * np.log(r / R))
        return f
    if name == "half_plane":
        line = dom.primitives[0]
        return lambda z: 1.0 / line.signed(z)
    # annulus: strip covering w = log(z - o)
    o = as_point(g("center", 0.0))
    d, m = float(g("d", 1.0)), float(g("m"))
    c = math.pi / (2 * m)

    def f(z):
        r = np.abs(z - o)
        return c / (r * np.cos(c * np.log(r / d)))
    return f


def density_function(dom: Domain, metric) -> tuple[DensityFn, bool]:
    """Vectorised (lower, upper) density evaluator and whether it is exact."""
    metric = MetricKind.parse(metric)
    if metric is K:
        def qh(z):
            v = 1.0 / dom.delta_many(z)
            return v, v
        return qh, True
    if not dom.hyperbolic:
        raise DomainError("the hyperbolic metric needs a hyperbolic domain")
    exact = _exact_hyperbolic(dom)
    if exact is not None:
        def hx(z):
            v = exact(z)
            return v, v
        return hx, True

    return (lambda z: bpt_interval(dom, z)), False


def bpt_interval(dom: Domain, z) -> tuple[np.ndarray, np.ndarray]:
    """Two-sided hyperbolic density bound from delta and beta (valid on any hyperbolic domain)."""
    z = np.asarray(z, dtype=complex)
    delta = dom.delta_many(z)
    b = beta_many(dom, z)
    lower = 1.0 / (delta * (KAPPA + b))
    with np.errstate(divide="ignore"):
        upper = np.where(b > 0, (0.5 * math.pi) / (delta * b), np.inf)
    return lower, upper


def qh_density(dom: Domain, z) -> float:
    return 1.0 / dom.delta(z)


def hyp_density(dom: Domain, z) -> DensityInterval:
    z = dom.require(z)
    fn, exact = density_function(dom, H)
    lo, hi = fn(np.array([z]))
    return DensityInterval(float(lo[0]), float(hi[0]), exact)


def bp_comparison_bounds(delta: float, beta: float) -> tuple[float, float]:
    """The cruder two-sided bound 1/(2 delta beta) <= lambda <= 2/(delta beta), valid once beta >= kappa."""
    if beta < KAPPA:
        raise ValueError("comparison bound needs beta >= kappa")
    return 1.0 / (2 * delta * beta), 2.0 / (delta * beta)


def lambda01_lower(z) -> float:
    """Lower bound for the hyperbolic density of C minus {0, 1}; equality only at -1."""
    z = as_point(z)
    r = abs(z)
    return 1.0 / (r * (KAPPA + abs(math.log(r))))


def h01_lower(a, b) -> float:
    """Distance lower bound in C minus {0, 1} for 0 < |a| <= |b| <= 1."""
    ra, rb = abs(as_point(a)), abs(as_point(b))
    if not 0 < ra <= rb <= 1:
        raise ValueError("need 0 < |a| <= |b| <= 1")
    return math.log((KAPPA + math.log(1 / ra)) / (KAPPA + math.log(1 / rb)))


# ----------------------------------------------------------------------
# paths and lengths
# ----------------------------------------------------------------------

class PathError(ValueError):
    """A path leaves the domain."""


def validate_path(dom: Domain, path) -> PathPolyline:
    p = path if isinstance(path, PathPolyline) else PathPolyline(path)
    v = p.vertices
    if not dom.path_inside(v):
        clear = dom.segment_clearance(v[:-1], v[1:])
        i = int(np.argmin(clear))
        raise PathError(f"segment {i} ({v[i]:g} -> {v[i + 1]:g}) leaves the domain")
    return p


def _gl_segments(fn, p0, p1):
    d = p1 - p0
    pts = p0[:, None] + _GL_T[None, :] * d[:, None]
    vals = fn(pts)
    return np.abs(d) * (vals @ _GL_W2)


def nearest_switches(dom: Domain, p0, p1, samples: int = KINK_SAMPLES) -> tuple[np.ndarray, np.ndarray]:
    """Points on each segment where the nearest primitive changes (kinks of delta).

    Returns (segment index, parameter t) pairs. Switches closer together than
    one sampling step may be missed.
    """
    t = np.linspace(0.0, 1.0, samples)
    d = p1 - p0
    z = p0[:, None] + t[None, :] * d[:, None]
    near = np.argmin(dom.distances(z), axis=0)
    seg, k = np.nonzero(near[:, 1:] != near[:, :-1])
    if seg.size == 0:
        return seg, np.zeros(0)
    lo, hi = t[k].copy(), t[k + 1].copy()
    left = near[seg, k]
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        m = np.argmin(dom.distances(p0[seg] + mid * d[seg]), axis=0)
        same = m == left
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return seg, 0.5 * (lo + hi)


def integrate(fn: Callable[[np.ndarray], np.ndarray], vertices, rtol: float = QUAD_RTOL,
              per_segment: bool = False, dom: Domain | None = None):
    """Adaptive composite Gauss-Legendre integral of fn along a polyline.

    Passing dom splits segments where the nearest boundary primitive changes.
    A kink near a piece's end can sit outside every Gauss node and fool the
    coarse-vs-fine error estimate.
    """
    v = as_vertices(vertices)
    p0, p1 = v[:-1].copy(), v[1:].copy()
    owner = np.arange(p0.size)
    if dom is not None and p0.size:
        seg, ts = nearest_switches(dom, p0, p1)
        if seg.size:
            cuts = [[] for _ in range(p0.size)]
            for i, t in zip(seg.tolist(), ts.tolist()):
                cuts[i].append(t)
            q0, q1, own = [], [], []
            for i in range(p0.size):
                tt = [0.0] + sorted(cuts[i]) + [1.0]
                pts = p0[i] + np.array(tt) * (p1[i] - p0[i])
                q0.extend(pts[:-1]); q1.extend(pts[1:]); own.extend([i] * (len(tt) - 1))
            p0, p1, owner = np.array(q0), np.array(q1), np.array(own)
    coarse = _gl_segments(fn, p0, p1)
    total = np.zeros(v.size - 1)
    for _ in range(QUAD_MAX_DEPTH):
        if p0.size == 0:
            break
        mid = 0.5 * (p0 + p1)
        left = _gl_segments(fn, p0, mid)
        right = _gl_segments(fn, mid, p1)
        fine = left + right
        with np.errstate(invalid="ignore"):
            err = np.abs(fine - coarse)
            ok = ~np.isfinite(fine) | (err <= rtol * np.abs(fine) + 1e-300)
        np.add.at(total, owner[ok], fine[ok])
        keep = ~ok
        p0, p1, owner = (np.concatenate([p0[keep], mid[keep]]),
                         np.concatenate([mid[keep], p1[keep]]),
                         np.concatenate([owner[keep], owner[keep]]))
        coarse = np.concatenate([left[keep], right[keep]])
    else:
        np.add.at(total, owner, coarse)
    return total if per_segment else float(total.sum())


def fixed_quadrature(fn, p0, p1) -> np.ndarray:
    """Single-level 8-point rule per segment (fast, for optimisation loops)."""
    return _gl_segments(fn, np.asarray(p0, dtype=complex), np.asarray(p1, dtype=complex))


def path_length(dom: Domain, path, metric, rtol: float = QUAD_RTOL,
                check: bool = True) -> DensityInterval:
    p = validate_path(dom, path) if check else path
    v = as_vertices(p)
    fn, exact = density_function(dom, metric)
    if exact:
        val = integrate(lambda z: fn(z)[0], v, rtol, dom=dom)
        return DensityInterval(val, val, True)
    lo = integrate(lambda z: fn(z)[0], v, rtol, dom=dom)
    hi = integrate(lambda z: fn(z)[1], v, rtol, dom=dom)
    return DensityInterval(lo, max(hi, lo), False)


def segment_lengths(dom: Domain, path, metric, rtol: float = QUAD_RTOL) -> np.ndarray:
    """Per-segment lengths under the lower density (exact densities: the length)."""
    fn, _ = density_function(dom, metric)
    return integrate(lambda z: fn(z)[0], as_vertices(path), rtol, per_segment=True, dom=dom)


def euclidean_length(path) -> float:
    v = as_vertices(path)
    return float(np.sum(np.abs(np.diff(v))))


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------

def _halfplane_dist(w1: complex, w2: complex) -> float:
    """Distance in the left half-plane {Re w < 0} with density 1/|Re w|."""
    x1, x2 = -w1.real, -w2.real
    return 2.0 * math.asinh(abs(w1 - w2) / (2.0 * math.sqrt(x1 * x2)))


def dstar_h(a: complex, b: complex) -> float:
    """Hyperbolic distance in the punctured unit disk."""
    w1 = cmath.log(a)
    w2 = cmath.log(b)
    return min(_halfplane_dist(w1, w2 + 2j * math.pi * k)
               for k in range(-DECK_SHIFTS, DECK_SHIFTS + 1))


def disk_h(a: complex, b: complex) -> float:
    q = abs(a - b) / abs(1 - a.conjugate() * b)
    return 2.0 * math.atanh(q)


def cstar_k(a: complex, b: complex) -> float:
    return abs(cmath.log(b / a))


def _model_center_radius(dom: Domain) -> tuple[complex, float]:
    g = dom.model.param
    return as_point(g("center", 0.0)), float(g("R", 1.0))


def closed_form_distance(dom: Domain, metric, a, b) -> float | None:
    metric = MetricKind.parse(metric)
    a, b = dom.require(a), dom.require(b)
    name = dom.model_name
    if a == b:
        return 0.0
    if metric is K:
        if name == "punctured_plane":
            o = as_point(dom.model.param("center", 0.0))
            return cstar_k(a - o, b - o)
        if name in ("punctured_unit_disk", "punctured_disk"):
            o, R = _model_center_radius(dom)
            if abs(a - o) <= 0.5 * R and abs(b - o) <= 0.5 * R:
                # the log spiral stays where delta = |z - o|, so k equals k_*
                return cstar_k(a - o, b - o)
        return None
    if not dom.hyperbolic:
        raise DomainError("the hyperbolic metric needs a hyperbolic domain")
    if name == "unit_disk":
        return disk_h(a, b)
    if name in ("punctured_unit_disk", "punctured_disk"):
        o, R = _model_center_radius(dom)
        return dstar_h((a - o) / R, (b - o) / R)
    if name == "disk_complement":
        o, R = _model_center_radius(dom)
        return dstar_h(R / (a - o), R / (b - o))
    if name == "half_plane":
        line = dom.primitives[0]
        ya, yb = float(line.signed(a)), float(line.signed(b))
        return 2.0 * math.asinh(abs(a - b) / (2.0 * math.sqrt(ya * yb)))
    return None


@dataclass(frozen=True)
class GehringPalka:
    j: float
    log_delta_ratio: float
    log_center_ratio: float | None = None

    def __float__(self) -> float:
        return self.j

    @property
    def best(self) -> float:
        return max(self.j, self.log_center_ratio or 0.0)


def gehring_palka_bounds(dom: Domain, a, b, o=None) -> GehringPalka:
    a, b = dom.require(a), dom.require(b)
    da, db = dom.delta(a), dom.delta(b)
    j = math.log1p(abs(a - b) / min(da, db))
    lc = None
    if o is not None:
        o = as_point(o)
        if not dom.in_complement(o):
            raise DomainError(f"{o} is not a complement point")
        lc = abs(math.log(abs(a - o) / abs(b - o)))
    return GehringPalka(j, abs(math.log(da / db)), lc)


def gehring_palka_lower(dom: Domain, a, b) -> float:
    return gehring_palka_bounds(dom, a, b).j


# ----------------------------------------------------------------------
# inversion
# ----------------------------------------------------------------------

def inversion_pullback_density(image: Domain) -> Callable[[np.ndarray], np.ndarray]:
    """Density of the image quasihyperbolic metric pulled back by z -> 1/z."""
    def f(z):
        w = 1.0 / z
        return (1.0 / np.abs(z) ** 2) / image.delta_many(w)
    return f
