"""Planar primitives and annulus algebra.

Points are Python complex numbers. Annuli are stored in log-radius form so
that moduli in the hundreds never overflow.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LOG_TOL = 1e-12
REL_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when an annulus operation is given out-of-range parameters."""


def as_point(z) -> complex:
    """Accept complex, (x, y) pairs or numpy scalars."""
    if isinstance(z, complex):
        return z
    if isinstance(z, (int, float, np.floating, np.integer)):
        return complex(float(z), 0.0)
    if isinstance(z, np.complexfloating):
        return complex(z)
    x, y = z
    return complex(float(x), float(y))


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise GeometryError(f"circle radius must be >= 0, got {self.radius}")

    def point_at(self, angle: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * angle)


class Degeneracy(str, enum.Enum):
    PROPER = "proper"
    PUNCTURED_DISK = "punctured_disk"
    DISK_COMPLEMENT = "disk_complement"


@dataclass(frozen=True)
class Annulus:
    """Round annulus about ``center``.

    For a proper annulus ``log_radius`` is log of the center-circle radius and
    the annulus is {d e^-m < |z - o| < d e^m}. For the degenerate variants
    ``log_radius`` is log of the single finite boundary radius and
    ``half_modulus`` is infinite.
    """

    center: complex
    log_radius: float
    half_modulus: float
    kind: Degeneracy = Degeneracy.PROPER

    def __post_init__(self):
        if not math.isfinite(self.log_radius):
            raise GeometryError("annulus radius must be positive and finite")
        if self.kind is Degeneracy.PROPER:
            if not (self.half_modulus > 0 and math.isfinite(self.half_modulus)):
                raise GeometryError(f"half modulus must be positive, got {self.half_modulus}")
        elif self.half_modulus != math.inf:
            raise GeometryError("degenerate annuli carry an infinite half modulus")

    # constructors -----------------------------------------------------
    @classmethod
    def proper(cls, center, d: float, m: float) -> "Annulus":
        if not d > 0:
            raise GeometryError(f"center radius must be positive, got {d}")
        return cls(as_point(center), math.log(d), float(m))

    @classmethod
    def from_radii(cls, center, r: float, R: float) -> "Annulus":
        if r == 0 and R == math.inf:
            raise GeometryError("the punctured plane is not an annulus")
        if r == 0:
            return cls.punctured_disk(center, R)
        if R == math.inf:
            return cls.disk_complement(center, r)
        if not 0 < r < R:
            raise GeometryError(f"need 0 < r < R, got r={r}, R={R}")
        lr, lR = math.log(r), math.log(R)
        return cls(as_point(center), 0.5 * (lr + lR), 0.5 * (lR - lr))

    @classmethod
    def from_log_radii(cls, center, log_r: float, log_R: float) -> "Annulus":
        if not log_r < log_R:
            raise GeometryError("need log_r < log_R")
        return cls(as_point(center), 0.5 * (log_r + log_R), 0.5 * (log_R - log_r))

    @classmethod
    def punctured_disk(cls, center, R: float) -> "Annulus":
        return cls(as_point(center), math.log(R), math.inf, Degeneracy.PUNCTURED_DISK)

    @classmethod
    def disk_complement(cls, center, R: float) -> "Annulus":
        return cls(as_point(center), math.log(R), math.inf, Degeneracy.DISK_COMPLEMENT)

    # radii ------------------------------------------------------------
    @property
    def is_proper(self) -> bool:
        return self.kind is Degeneracy.PROPER

    @property
    def center_radius(self) -> float:
        return math.exp(self.log_radius)

    @property
    def log_inner(self) -> float:
        if self.kind is Degeneracy.PUNCTURED_DISK:
            return -math.inf
        if self.kind is Degeneracy.DISK_COMPLEMENT:
            return self.log_radius
        return self.log_radius - self.half_modulus

    @property
    def log_outer(self) -> float:
        if self.kind is Degeneracy.PUNCTURED_DISK:
            return self.log_radius
        if self.kind is Degeneracy.DISK_COMPLEMENT:
            return math.inf
        return self.log_radius + self.half_modulus

    @property
    def inner_radius(self) -> float:
        return math.exp(self.log_inner)

    @property
    def outer_radius(self) -> float:
        return math.exp(self.log_outer)

    def modulus(self) -> float:
        return 2.0 * self.half_modulus

    def center_circle(self) -> Circle:
        if not self.is_proper:
            raise GeometryError("degenerate annuli have no center circle")
        return Circle(self.center, self.center_radius)

    def inner_circle(self) -> Circle:
        return Circle(self.center, self.inner_radius)

    def outer_circle(self) -> Circle:
        return Circle(self.center, self.outer_radius)

    # membership -------------------------------------------------------
    def log_distance(self, z) -> float:
        r = abs(as_point(z) - self.center)
        return math.log(r) if r > 0 else -math.inf

    def contains(self, z) -> bool:
        u = self.log_distance(z)
        return self.log_inner < u < self.log_outer

    def closure_contains(self, z, tol: float = LOG_TOL) -> bool:
        u = self.log_distance(z)
        if self.kind is Degeneracy.PUNCTURED_DISK:
            return u <= self.log_outer + tol
        return self.log_inner - tol <= u <= self.log_outer + tol

    def isclose(self, other: "Annulus", tol: float = LOG_TOL) -> bool:
        scale = 1.0 + abs(self.center)
        if self.kind is not other.kind or abs(self.center - other.center) > REL_TOL * scale:
            return False
        if abs(self.log_radius - other.log_radius) > tol:
            return False
        if self.is_proper:
            return abs(self.half_modulus - other.half_modulus) <= tol
        return True

    def __str__(self) -> str:
        o = self.center
        if self.kind is Degeneracy.PUNCTURED_DISK:
            return f"D*({o:g}; {self.outer_radius:.6g})"
        if self.kind is Degeneracy.DISK_COMPLEMENT:
            return f"C\\D[{o:g}; {self.inner_radius:.6g}]"
        return f"{{{self.inner_radius:.6g} < |z - {o:g}| < {self.outer_radius:.6g}}}"

    def to_dict(self) -> dict:
        out = {
            "type": self.kind.value,
            "center": [self.center.real, self.center.imag],
            "inner_radius": self.inner_radius,
            "outer_radius": self.outer_radius,
        }
        if self.is_proper:
            out["center_radius"] = self.center_radius
            out["half_modulus"] = self.half_modulus
        return out


# ----------------------------------------------------------------------
# core / band algebra
# ----------------------------------------------------------------------

def core(a: Annulus, q: float) -> Annulus:
    """Remove a collar of modulus q from each side."""
    if not q > 0:
        raise GeometryError(f"core depth must be positive, got {q}")
    if a.kind is Degeneracy.PUNCTURED_DISK:
        return Annulus(a.center, a.log_radius - q, math.inf, a.kind)
    if a.kind is Degeneracy.DISK_COMPLEMENT:
        return Annulus(a.center, a.log_radius + q, math.inf, a.kind)
    if q >= a.half_modulus:
        raise GeometryError(f"core depth {q} must be below the half modulus {a.half_modulus}")
    return Annulus(a.center, a.log_radius, a.half_modulus - q)


def band(a: Annulus | Circle, r: float) -> Annulus:
    """Add a collar of modulus r to each side (inverse of :func:`core`)."""
    if not r > 0:
        raise GeometryError(f"band width must be positive, got {r}")
    if isinstance(a, Circle):
        if not a.radius > 0:
            raise GeometryError("cannot band a zero-radius circle")
        return Annulus.proper(a.center, a.radius, r)
    if a.kind is Degeneracy.PUNCTURED_DISK:
        return Annulus(a.center, a.log_radius + r, math.inf, a.kind)
    if a.kind is Degeneracy.DISK_COMPLEMENT:
        return Annulus(a.center, a.log_radius - r, math.inf, a.kind)
    return Annulus(a.center, a.log_radius, a.half_modulus + r)


def _same_center(p: complex, q: complex) -> bool:
    return abs(p - q) <= REL_TOL * (1.0 + abs(p) + abs(q))


def is_concentric_subannulus(inner: Annulus, outer: Annulus) -> bool:
    """True iff the centers agree and closure(inner) lies inside ``outer``."""
    if not inner.is_proper or not _same_center(inner.center, outer.center):
        return False
    return (outer.log_inner < inner.log_inner - LOG_TOL
            and inner.log_outer + LOG_TOL < outer.log_outer)


def _side(a: Annulus, z: complex) -> int:
    """-1 closed inside component, +1 closed outside component, 0 in the annulus."""
    r = abs(z - a.center)
    if a.kind is Degeneracy.PUNCTURED_DISK:
        if r == 0.0:
            return -1
        return 1 if math.log(r) >= a.log_outer - LOG_TOL else 0
    u = math.log(r) if r > 0 else -math.inf
    if u <= a.log_inner + LOG_TOL:
        return -1
    if u >= a.log_outer - LOG_TOL:
        return 1
    return 0


def separates(a: Annulus, p, q) -> bool:
    sp, sq = _side(a, as_point(p)), _side(a, as_point(q))
    return sp * sq == -1


def annuli_intersect(a1: Annulus, a2: Annulus) -> bool:
    """Whether two open annuli (possibly with different centers) meet."""
    D = abs(a1.center - a2.center)
    r1, R1 = a1.inner_radius, a1.outer_radius
    # distances from a2's center realised by points of a1 form the open
    # interval (dist(D, (r1, R1)), R1 + D)
    if r1 < D < R1:
        lo = 0.0
    else:
        lo = min(abs(r1 - D), abs(R1 - D))
    hi = R1 + D
    r2, R2 = a2.inner_radius, a2.outer_radius
    return max(lo, r2) < min(hi, R2) * (1 - 1e-12)


# ----------------------------------------------------------------------
# polylines
# ----------------------------------------------------------------------

class PathPolyline:
    """Ordered vertex sequence, stored as a complex numpy array.

    Consecutive vertices must be distinct. Positions along the path are
    addressed by a float parameter ``s = i + t`` meaning the point at
    fraction ``t`` of segment ``i``.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable):
        v = np.asarray([as_point(z) for z in vertices], dtype=complex)
        if v.ndim != 1 or v.size < 2:
            raise GeometryError("a path needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("path vertices must be finite")
        if np.any(v[1:] == v[:-1]):
            raise GeometryError("consecutive path vertices must be distinct")
        self.vertices = v

    @classmethod
    def dedup(cls, vertices: Iterable) -> "PathPolyline":
        v = np.asarray([as_point(z) for z in vertices], dtype=complex)
        keep = np.ones(v.size, dtype=bool)
        keep[1:] = v[1:] != v[:-1]
        return cls(v[keep])

    def __len__(self) -> int:
        return int(self.vertices.size)

    @property
    def start(self) -> complex:
        return complex(self.vertices[0])

    @property
    def end(self) -> complex:
        return complex(self.vertices[-1])

    @property
    def n_segments(self) -> int:
        return self.vertices.size - 1

    def reversed(self) -> "PathPolyline":
        return PathPolyline(self.vertices[::-1])

    def euclidean_length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def point_at(self, s: float) -> complex:
        i = min(int(math.floor(s)), self.n_segments - 1)
        i = max(i, 0)
        t = s - i
        return complex(self.vertices[i] + t * (self.vertices[i + 1] - self.vertices[i]))

    def subpath(self, s0: float, s1: float) -> "PathPolyline":
        """Subpath between parameters s0 <= s1 (reversed if s0 > s1)."""
        if s0 > s1:
            return self.subpath(s1, s0).reversed()
        p0, p1 = self.point_at(s0), self.point_at(s1)
        inner = [complex(v) for k, v in enumerate(self.vertices) if s0 < k < s1]
        pts = [p0, *inner, p1]
        if len(pts) == 2 and p0 == p1:
            raise GeometryError("empty subpath")
        return PathPolyline.dedup(pts)

    def arclength_params(self) -> np.ndarray:
        """Cumulative Euclidean arclength at each vertex."""
        return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(self.vertices)))])

    def param_at_arclength(self, s_len: float) -> float:
        cum = self.arclength_params()
        s_len = min(max(s_len, 0.0), cum[-1])
        i = int(np.searchsorted(cum, s_len, side="right") - 1)
        i = min(i, self.n_segments - 1)
        seg = cum[i + 1] - cum[i]
        return i + (s_len - cum[i]) / seg

    def concat(self, other: "PathPolyline") -> "PathPolyline":
        if abs(self.end - other.start) > 1e-12 * (1 + abs(self.end)):
            raise GeometryError("paths do not join")
        return PathPolyline.dedup(np.concatenate([self.vertices, other.vertices[1:]]))

    def __repr__(self) -> str:
        return f"PathPolyline(n={len(self)}, {self.start:g} -> {self.end:g})"


def as_vertices(path) -> np.ndarray:
    if isinstance(path, PathPolyline):
        return path.vertices
    return np.asarray([as_point(z) for z in path], dtype=complex)


def circle_roots(p0: complex, p1: complex, o: complex, r: float) -> tuple[float, ...]:
    """Parameters t (any real) where the line p0 + t (p1 - p0) meets S^1(o; r)."""
    d = p1 - p0
    w = p0 - o
    A = abs(d) ** 2
    B = 2.0 * (w.real * d.real + w.imag * d.imag)
    C = abs(w) ** 2 - r * r
    disc = B * B - 4 * A * C
    if disc < 0:
        return ()
    sq = math.sqrt(disc)
    # numerically stable pair
    qq = -0.5 * (B + math.copysign(sq, B)) if B != 0 else -0.5 * sq
    if qq == 0:
        return (0.0,) if C == 0 else ()
    t1, t2 = qq / A, C / qq
    return tuple(sorted((t1, t2)))


def _closed_annulus_intervals(p0: complex, p1: complex, a: Annulus) -> list[tuple[float, float]]:
    """Sub-intervals of [0, 1] where the segment lies in closure(a)."""
    o = a.center
    r_in, r_out = a.inner_radius, a.outer_radius

    def q(t):
        return abs(p0 + t * (p1 - p0) - o)

    # interval where |z-o| <= r_out (convex => one interval)
    if math.isinf(r_out):
        lo_out, hi_out = 0.0, 1.0
    else:
        roots = circle_roots(p0, p1, o, r_out)
        if len(roots) < 2:
            return []
        lo_out, hi_out = max(roots[0], 0.0), min(roots[1], 1.0)
        if lo_out > hi_out:
            return []
    if r_in == 0:
        return [(lo_out, hi_out)]
    roots = circle_roots(p0, p1, o, r_in)
    if len(roots) < 2 or roots[0] == roots[1]:
        return [(lo_out, hi_out)]
    # exclude open interval (roots[0], roots[1]) where |z-o| < r_in
    out = []
    if lo_out <= min(roots[0], hi_out):
        out.append((lo_out, min(roots[0], hi_out)))
    if max(roots[1], lo_out) <= hi_out:
        out.append((max(roots[1], lo_out), hi_out))
    return [iv for iv in out if q(0.5 * (iv[0] + iv[1])) >= r_in * (1 - 1e-12) or iv[0] == iv[1]]


def first_in_closure(path, a: Annulus, reverse: bool = False) -> tuple[float, complex] | None:
    """First (or last) point of the path in closure(a), as (parameter, point)."""
    v = as_vertices(path)
    n = v.size - 1
    order = range(n - 1, -1, -1) if reverse else range(n)
    for i in order:
        ivs = _closed_annulus_intervals(complex(v[i]), complex(v[i + 1]), a)
        if ivs:
            t = ivs[-1][1] if reverse else ivs[0][0]
            return i + t, complex(v[i] + t * (v[i + 1] - v[i]))
    return None


def _transversal_hits(v: np.ndarray, o: complex, r: float) -> list[float]:
    """Parameters where the path crosses S^1(o; r) with a sign change."""
    if r == 0 or math.isinf(r):
        return []
    hits: list[float] = []
    prev_sign = 0
    for i in range(v.size - 1):
        p0, p1 = complex(v[i]), complex(v[i + 1])
        roots = [t for t in circle_roots(p0, p1, o, r) if 0.0 <= t <= 1.0]
        knots = sorted({0.0, 1.0, *roots})
        for t0, t1 in zip(knots[:-1], knots[1:]):
            tm = 0.5 * (t0 + t1)
            g = abs(p0 + tm * (p1 - p0) - o) - r
            s = (g > 0) - (g < 0)
            if s == 0:
                continue
            if prev_sign and s != prev_sign:
                hits.append(i + t0)
            prev_sign = s
    return hits


def crossing_count(a: Annulus, path) -> int:
    """Maximal number of non-overlapping subpaths meeting both boundary circles."""
    if not a.is_proper:
        return 0
    v = as_vertices(path)
    events = [(s, 0) for s in _transversal_hits(v, a.center, a.inner_radius)]
    events += [(s, 1) for s in _transversal_hits(v, a.center, a.outer_radius)]
    events.sort()
    runs = 0
    last = None
    for _, which in events:
        if which != last:
            runs += 1
            last = which
    return max(runs - 1, 0)


def unique_points(points: Sequence[complex], tol: float = 1e-12) -> list[complex]:
    out: list[complex] = []
    for p in points:
        if all(abs(p - q) > tol * (1 + abs(q)) for q in out):
            out.append(p)
    return out
