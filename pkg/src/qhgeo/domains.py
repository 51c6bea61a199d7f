"""Plane domains described by finitely many boundary primitives.

The complement of a domain is the union of closed sets, one per primitive:

* ``PointPrimitive``   the single point p
* ``CirclePrimitive``  side="hole": the closed disk D[c; R];
                       side="complement": the closed exterior {|w - c| >= R}
* ``LinePrimitive``    the closed half-plane to the right of the oriented line
                       through ``point`` with unit ``direction``

So delta(z) is the minimum over primitives of the distance from z to each
closed piece, and every quantity below is exact up to floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geom import Annulus, Degeneracy, as_point

WITNESS_REL_TOL = 1e-9


class DomainError(ValueError):
    """Invalid domain description or a point outside the domain."""


def _arr(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


# ----------------------------------------------------------------------
# primitives
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PointPrimitive:
    p: complex
    bounded = True

    def distance(self, z):
        return np.abs(_arr(z) - self.p)

    def nearest(self, z):
        return np.full(np.shape(z), self.p, dtype=complex)

    def extent(self, zeta):
        d = np.abs(_arr(zeta) - self.p)
        return d, d

    def point_at_distance(self, zeta: complex, r: float) -> complex:
        return self.p

    def segment_clearance(self, p0, p1):
        p0, p1 = _arr(p0), _arr(p1)
        d = p1 - p0
        L2 = np.abs(d) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(L2 > 0, ((self.p - p0) * np.conj(d)).real / L2, 0.0)
        t = np.clip(t, 0.0, 1.0)
        return np.abs(p0 + t * d - self.p)

    def to_dict(self):
        return [self.p.real, self.p.imag]


@dataclass(frozen=True)
class CirclePrimitive:
    center: complex
    radius: float
    side: str  # "hole" or "complement"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"circle radius must be positive, got {self.radius}")
        if self.side not in ("hole", "complement"):
            raise DomainError(f"circle side must be 'hole' or 'complement', got {self.side!r}")

    @property
    def bounded(self) -> bool:
        return self.side == "hole"

    def distance(self, z):
        r = np.abs(_arr(z) - self.center)
        if self.side == "hole":
            return np.maximum(r - self.radius, 0.0)
        return np.maximum(self.radius - r, 0.0)

    def _direction(self, z):
        w = _arr(z) - self.center
        r = np.abs(w)
        with np.errstate(invalid="ignore", divide="ignore"):
            u = np.where(r > 0, w / np.where(r > 0, r, 1.0), 1.0 + 0j)
        return u

    def nearest(self, z):
        return self.center + self.radius * self._direction(z)

    def extent(self, zeta):
        D = np.abs(_arr(zeta) - self.center)
        R = self.radius
        if self.side == "hole":
            return np.maximum(D - R, 0.0), D + R
        return np.maximum(R - D, 0.0), np.full(np.shape(D), np.inf)

    def point_at_distance(self, zeta: complex, r: float) -> complex:
        """A point of this closed piece at distance r from zeta (r inside the extent)."""
        u = complex(self._direction(zeta))
        if self.side == "hole":
            # walk from zeta toward the center
            return zeta - r * u
        return zeta + r * u

    def segment_clearance(self, p0, p1):
        p0, p1 = _arr(p0), _arr(p1)
        if self.side == "complement":
            far = np.maximum(np.abs(p0 - self.center), np.abs(p1 - self.center))
            return np.maximum(self.radius - far, 0.0)
        return np.maximum(PointPrimitive(self.center).segment_clearance(p0, p1) - self.radius, 0.0)

    def to_dict(self):
        return {"center": [self.center.real, self.center.imag], "radius": self.radius, "side": self.side}


@dataclass(frozen=True)
class LinePrimitive:
    point: complex
    direction: complex
    bounded = False

    def __post_init__(self):
        if abs(abs(self.direction) - 1.0) > 1e-9:
            raise DomainError("line direction must have unit length")

    @property
    def normal(self) -> complex:
        # points into the domain side (left of the direction)
        return 1j * self.direction

    def signed(self, z):
        return ((_arr(z) - self.point) * np.conj(self.normal)).real

    def distance(self, z):
        return np.maximum(self.signed(z), 0.0)

    def nearest(self, z):
        return _arr(z) - self.signed(z) * self.normal

    def extent(self, zeta):
        s = self.signed(zeta)
        return np.maximum(s, 0.0), np.full(np.shape(s), np.inf)

    def point_at_distance(self, zeta: complex, r: float) -> complex:
        return zeta - r * self.normal

    def segment_clearance(self, p0, p1):
        return np.maximum(np.minimum(self.signed(p0), self.signed(p1)), 0.0)

    def to_dict(self):
        return {"point": [self.point.real, self.point.imag],
                "direction": [self.direction.real, self.direction.imag]}


Primitive = PointPrimitive | CirclePrimitive | LinePrimitive


# ----------------------------------------------------------------------
# model tags
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModelTag:
    name: str
    params: tuple = ()

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


MODEL_NAMES = (
    "unit_disk", "punctured_unit_disk", "punctured_plane", "twice_punctured_plane",
    "annulus", "half_plane", "disk_complement", "punctured_disk",
)


def _model_primitives(tag: ModelTag) -> tuple:
    g = tag.param
    name = tag.name
    if name == "unit_disk":
        return (CirclePrimitive(0j, 1.0, "complement"),)
    if name == "punctured_unit_disk":
        return (PointPrimitive(0j), CirclePrimitive(0j, 1.0, "complement"))
    if name == "punctured_plane":
        return (PointPrimitive(as_point(g("center", 0.0))),)
    if name == "twice_punctured_plane":
        return (PointPrimitive(as_point(g("a", 0.0))), PointPrimitive(as_point(g("b", 1.0))))
    if name == "annulus":
        o, d, m = as_point(g("center", 0.0)), float(g("d", 1.0)), float(g("m"))
        return (CirclePrimitive(o, d * math.exp(-m), "hole"),
                CirclePrimitive(o, d * math.exp(m), "complement"))
    if name == "half_plane":
        return (LinePrimitive(as_point(g("point", 0.0)), as_point(g("direction", 1.0))),)
    if name == "disk_complement":
        return (CirclePrimitive(as_point(g("center", 0.0)), float(g("R", 1.0)), "hole"),)
    if name == "punctured_disk":
        o = as_point(g("center", 0.0))
        return (PointPrimitive(o), CirclePrimitive(o, float(g("R", 1.0)), "complement"))
    raise DomainError(f"unknown model tag {name!r}")


def _prim_close(p, q, tol=1e-9) -> bool:
    if type(p) is not type(q):
        return False
    if isinstance(p, PointPrimitive):
        return abs(p.p - q.p) <= tol * (1 + abs(p.p))
    if isinstance(p, CirclePrimitive):
        return (p.side == q.side and abs(p.center - q.center) <= tol * (1 + abs(p.center))
                and abs(p.radius - q.radius) <= tol * p.radius)
    return (abs(p.direction - q.direction) <= tol
            and abs(p.signed(q.point)) <= tol * (1 + abs(p.point)))


# ----------------------------------------------------------------------
# domain
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NearBoundarySet:
    distance: float
    witnesses: tuple  # of (complex, primitive index)

    @property
    def points(self) -> list[complex]:
        return [w for w, _ in self.witnesses]


@dataclass(frozen=True)
class AnnulusMembership:
    inside: bool
    inner_touches: bool
    outer_touches: bool

    def __bool__(self) -> bool:
        return self.inside


@dataclass(frozen=True)
class Domain:
    primitives: tuple
    model: ModelTag | None = None

    def __post_init__(self):
        if not self.primitives:
            raise DomainError("a domain needs at least one boundary primitive")
        if self.model is not None:
            expected = _model_primitives(self.model)
            ok = len(expected) == len(self.primitives) and all(
                any(_prim_close(e, p) for p in self.primitives) for e in expected)
            if not ok:
                raise DomainError(f"primitives do not match model tag {self.model.name!r}")

    # constructors -----------------------------------------------------
    @classmethod
    def from_model(cls, name: str, **params) -> "Domain":
        tag = ModelTag(name, tuple(sorted(params.items())))
        return cls(_model_primitives(tag), tag)

    @classmethod
    def from_points(cls, points: Iterable) -> "Domain":
        return cls(tuple(PointPrimitive(as_point(p)) for p in points))

    @property
    def model_name(self) -> str | None:
        return self.model.name if self.model else None

    @property
    def hyperbolic(self) -> bool:
        pts = [p for p in self.primitives if isinstance(p, PointPrimitive)]
        if len(pts) < len(self.primitives):
            return True
        return len({(p.p.real, p.p.imag) for p in pts}) >= 2

    @property
    def bounded(self) -> bool:
        return any(isinstance(p, CirclePrimitive) and p.side == "complement" for p in self.primitives)

    @property
    def complement_points(self) -> list[complex]:
        return [p.p for p in self.primitives if isinstance(p, PointPrimitive)]

    # distance ---------------------------------------------------------
    def distances(self, z) -> np.ndarray:
        """Per-primitive distances, shape (n_primitives, *shape(z))."""
        return np.stack([p.distance(z) for p in self.primitives])

    def delta_many(self, z) -> np.ndarray:
        return np.min(self.distances(z), axis=0)

    def contains_many(self, z) -> np.ndarray:
        z = _arr(z)
        return np.isfinite(z) & (self.delta_many(z) > 0)

    def contains(self, z) -> bool:
        z = as_point(z)
        return bool(self.contains_many(np.array([z]))[0])

    def require(self, z) -> complex:
        z = as_point(z)
        if not self.contains(z):
            raise DomainError(f"point {z} is not in the domain")
        return z

    def delta(self, z) -> float:
        z = self.require(z)
        return float(self.delta_many(np.array([z]))[0])

    def nearest_boundary_points(self, z, tol: float | None = None) -> NearBoundarySet:
        z = self.require(z)
        ds = self.distances(np.array([z]))[:, 0]
        d = float(ds.min())
        if tol is None:
            tol = WITNESS_REL_TOL * (1 + d)
        wit = []
        for k, (prim, dk) in enumerate(zip(self.primitives, ds)):
            if dk - d <= tol:
                w = complex(prim.nearest(np.array([z]))[0])
                if all(abs(w - u) > 1e-15 * (1 + abs(w)) for u, _ in wit):
                    wit.append((w, k))
        wit.sort(key=lambda t: (t[0].real, t[0].imag))
        return NearBoundarySet(d, tuple(wit))

    def segment_clearance(self, p0, p1) -> np.ndarray:
        """Exact distance from each closed segment [p0, p1] to the complement."""
        return np.min(np.stack([p.segment_clearance(p0, p1) for p in self.primitives]), axis=0)

    def path_inside(self, vertices) -> bool:
        v = np.asarray(vertices, dtype=complex)
        return bool(np.all(self.segment_clearance(v[:-1], v[1:]) > 0))

    # radial structure about a complement point ------------------------
    def radial_extents(self, zeta: complex) -> list[tuple[float, float, int]]:
        """Distance ranges [dmin, dmax] from zeta to each closed complement piece.

        A point primitive sitting at zeta itself is skipped.
        """
        out = []
        for k, prim in enumerate(self.primitives):
            lo, hi = prim.extent(np.array([zeta]))
            lo, hi = float(lo[0]), float(hi[0])
            if isinstance(prim, PointPrimitive) and hi == 0.0:
                continue
            out.append((lo, hi, k))
        return out

    def in_complement(self, z, tol: float = 0.0) -> bool:
        z = as_point(z)
        return float(self.delta_many(np.array([z]))[0]) <= tol

    def annulus_in_domain(self, a: Annulus, tol: float = 1e-9) -> AnnulusMembership:
        """Membership of ``a`` in the family of annuli in the domain centered in the complement."""
        o = a.center
        if not self.in_complement(o, tol * (1 + abs(o))):
            return AnnulusMembership(False, False, False)
        r_in = 0.0 if a.kind is Degeneracy.PUNCTURED_DISK else a.inner_radius
        r_out = math.inf if a.kind is Degeneracy.DISK_COMPLEMENT else a.outer_radius
        inside, t_in, t_out = True, False, False
        for lo, hi, _ in self.radial_extents(o):
            if hi > r_in * (1 + tol) and lo < r_out * (1 - tol):
                inside = False
            if r_in > 0 and abs(hi - r_in) <= tol * r_in:
                t_in = True
            if math.isfinite(r_out) and abs(lo - r_out) <= tol * r_out:
                t_out = True
        return AnnulusMembership(inside, inside and t_in, inside and t_out)

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        out: dict = {}
        if self.model is not None:
            out["model"] = {"name": self.model.name, **{k: _jsonable(v) for k, v in self.model.params}}
        out["points"] = [p.to_dict() for p in self.primitives if isinstance(p, PointPrimitive)]
        out["circles"] = [p.to_dict() for p in self.primitives if isinstance(p, CirclePrimitive)]
        out["lines"] = [p.to_dict() for p in self.primitives if isinstance(p, LinePrimitive)]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        if not isinstance(data, dict):
            raise DomainError("domain description must be an object")
        tag = None
        model = data.get("model")
        if isinstance(model, str):
            tag = ModelTag(model)
        elif isinstance(model, dict):
            params = {k: _from_json(v) for k, v in model.items() if k not in ("name", "tag")}
            tag = ModelTag(model.get("name") or model.get("tag"), tuple(sorted(params.items())))
        elif model is not None:
            raise DomainError("model must be a string or an object")
        if tag is not None and tag.name not in MODEL_NAMES:
            raise DomainError(f"unknown model tag {tag.name!r}")
        try:
            prims: list = [PointPrimitive(as_point(p)) for p in data.get("points", [])]
            for c in data.get("circles", []):
                prims.append(CirclePrimitive(as_point(c["center"]), float(c["radius"]), c.get("side", "hole")))
            for ln in data.get("lines", []):
                prims.append(LinePrimitive(as_point(ln["point"]), as_point(ln["direction"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed domain primitive: {exc}") from exc
        if not prims and tag is not None:
            prims = list(_model_primitives(tag))
        return cls(tuple(prims), tag)

    @classmethod
    def load(cls, path: str | Path) -> "Domain":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _from_json(v):
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return v


# ----------------------------------------------------------------------
# named domains
# ----------------------------------------------------------------------

def unit_disk() -> Domain:
    return Domain.from_model("unit_disk")


def punctured_unit_disk() -> Domain:
    return Domain.from_model("punctured_unit_disk")


def punctured_plane(center=0.0) -> Domain:
    return Domain.from_model("punctured_plane", center=as_point(center))


def twice_punctured_plane(a=0.0, b=1.0) -> Domain:
    return Domain.from_model("twice_punctured_plane", a=as_point(a), b=as_point(b))


def annulus_domain(center=0.0, d: float = 1.0, m: float = 1.0) -> Domain:
    return Domain.from_model("annulus", center=as_point(center), d=float(d), m=float(m))


def half_plane(point=0.0, direction=1.0) -> Domain:
    """Half-plane to the left of the oriented line through ``point``."""
    u = as_point(direction)
    if u == 0:
        raise DomainError("line direction must be nonzero")
    return Domain.from_model("half_plane", point=as_point(point), direction=u / abs(u))


def disk_complement(center=0.0, R: float = 1.0) -> Domain:
    return Domain.from_model("disk_complement", center=as_point(center), R=float(R))


def punctured_disk(center=0.0, R: float = 1.0) -> Domain:
    return Domain.from_model("punctured_disk", center=as_point(center), R=float(R))


def point_complement(points: Sequence) -> Domain:
    """The plane minus finitely many points (no model tag)."""
    return Domain.from_points(points)


# ----------------------------------------------------------------------
# inversion z -> 1/z
# ----------------------------------------------------------------------

def invert_domain(dom: Domain) -> Domain:
    """Image of the domain under z -> 1/z; requires 0 in the complement."""
    if not dom.in_complement(0j):
        raise DomainError("inversion needs 0 in the complement")
    prims: list = []
    for p in dom.primitives:
        if isinstance(p, PointPrimitive):
            if p.p != 0:
                prims.append(PointPrimitive(1 / p.p))
        elif isinstance(p, CirclePrimitive):
            c, R = p.center, p.radius
            den = abs(c) ** 2 - R * R
            if abs(den) <= 1e-12 * max(1.0, abs(c) ** 2):
                raise DomainError("inversion of a circle through 0 is not supported")
            img = CirclePrimitive(c.conjugate() / den, R / abs(den),
                                  p.side if den > 0 else ("complement" if p.side == "hole" else "hole"))
            prims.append(img)
        else:
            raise DomainError("inversion of half-plane boundaries is not supported")
    if not dom.bounded:
        prims.append(PointPrimitive(0j))
    return Domain(tuple(prims))
