"""Beardon-Pommerenke beta function, its extremal annulus and the enlargement.

For z in the domain, beta(z) is the smallest |log(delta(z) / |zeta - xi|)| over
nearest boundary points zeta and complement points xi != zeta. With a finite
primitive list this is a finite minimisation: the distances from zeta to one
closed complement piece fill an interval [dmin, dmax], so each piece
contributes 0 when delta lies in that interval and otherwise the log-gap to
the nearer end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import (CirclePrimitive, Domain, DomainError, LinePrimitive,
                      PointPrimitive, WITNESS_REL_TOL)
from .geom import Annulus, as_point

LOG16 = math.log(16.0)
CONTACT_TOL = 1e-9


class BetaError(ValueError):
    """beta-dependent object requested where beta vanishes or hypotheses fail."""


@dataclass(frozen=True)
class BetaReport:
    value: float
    zeta: complex
    xi: complex
    delta: float
    bp_annulus: Annulus | None = None
    enlarged: Annulus | None = None

    def to_dict(self) -> dict:
        out = {
            "beta": self.value,
            "delta": self.delta,
            "zeta": [self.zeta.real, self.zeta.imag],
            "xi": [self.xi.real, self.xi.imag],
        }
        if self.bp_annulus is not None:
            out["bp_annulus"] = self.bp_annulus.to_dict()
        if self.enlarged is not None:
            out["enlarged"] = self.enlarged.to_dict()
        return out


def _log_gap(delta, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore"):
        below = np.where(delta < lo, np.log(lo / delta), 0.0)
        above = np.where(delta > hi, np.log(delta / hi), 0.0)
    return below + above


def _require_hyperbolic(dom: Domain):
    if not dom.hyperbolic:
        raise DomainError("beta needs a hyperbolic domain (at least two finite complement points)")


def beta_many(dom: Domain, z) -> np.ndarray:
    """Vectorised beta values (no witnesses)."""
    _require_hyperbolic(dom)
    z = np.asarray(z, dtype=complex)
    ds = dom.distances(z)
    delta = ds.min(axis=0)
    tol = WITNESS_REL_TOL * (1 + delta)
    out = np.full(z.shape, np.inf)
    for j, pj in enumerate(dom.primitives):
        near = ds[j] - delta <= tol
        if not np.any(near):
            continue
        zeta = pj.nearest(z)
        bj = np.full(z.shape, np.inf)
        for k, pk in enumerate(dom.primitives):
            if k == j and isinstance(pk, PointPrimitive):
                continue
            lo, hi = pk.extent(zeta)
            bj = np.minimum(bj, _log_gap(delta, lo, hi))
        out = np.where(near, np.minimum(out, bj), out)
    return out


def _contact_point(prim, zeta: complex, r: float) -> complex:
    """A boundary point of ``prim`` at distance r from zeta when one exists."""
    if isinstance(prim, PointPrimitive):
        return prim.p
    if isinstance(prim, LinePrimitive):
        s = float(prim.signed(zeta))
        foot = zeta - s * prim.normal
        return foot + math.sqrt(max(r * r - s * s, 0.0)) * prim.direction
    c, R = prim.center, prim.radius
    D = abs(zeta - c)
    if D > 0 and abs(D - R) <= r <= D + R:
        # intersection of S(zeta, r) with S(c, R)
        x = (D * D + r * r - R * R) / (2 * D)
        h = math.sqrt(max(r * r - x * x, 0.0))
        u = (c - zeta) / D
        return zeta + x * u + h * 1j * u
    return prim.point_at_distance(zeta, r)


def beta_at(dom: Domain, z) -> BetaReport:
    """beta(z) with witnesses zeta in B(z) and xi in the complement."""
    _require_hyperbolic(dom)
    z = dom.require(z)
    nbs = dom.nearest_boundary_points(z)
    delta = nbs.distance
    best = None
    for zeta, j in nbs.witnesses:
        for k, pk in enumerate(dom.primitives):
            if k == j and isinstance(pk, PointPrimitive):
                continue
            lo, hi = (float(v[0]) for v in pk.extent(np.array([zeta])))
            if isinstance(pk, PointPrimitive) and lo == 0.0:
                continue  # a duplicate of zeta itself
            if delta < lo:
                val, xi = math.log(lo / delta), pk.point_at_distance(zeta, lo)
            elif delta > hi:
                val, xi = math.log(delta / hi), pk.point_at_distance(zeta, hi)
            else:
                val, xi = 0.0, _contact_point(pk, zeta, delta)
            key = (val, zeta.real, zeta.imag, xi.real, xi.imag)
            if best is None or val < best[0] - 1e-12 * (1 + best[0]) or (
                    abs(val - best[0]) <= 1e-12 * (1 + best[0]) and key[1:] < best[1:]):
                best = key
    if best is None:
        raise DomainError("no second complement point")
    val, zr, zi, xr, xi_ = best
    return BetaReport(val, complex(zr, zi), complex(xr, xi_), delta)


def bp_annulus(dom: Domain, z, report: BetaReport | None = None) -> Annulus:
    rep = report or beta_at(dom, z)
    if rep.value <= 0:
        raise BetaError("beta(z) = 0: there is no extremal annulus")
    return Annulus.proper(rep.zeta, rep.delta, rep.value)


def enlarged_annulus(dom: Domain, z, report: BetaReport | None = None) -> Annulus:
    """Grow BP(z) until both boundary circles meet the boundary (or degenerate)."""
    rep = report or beta_at(dom, z)
    if rep.value <= 0:
        raise BetaError("beta(z) = 0: there is no extremal annulus")
    zeta = rep.zeta
    r_in = rep.delta * math.exp(-rep.value)
    r_out = rep.delta * math.exp(rep.value)
    eps, big = 0.0, math.inf
    for lo, hi, _ in dom.radial_extents(zeta):
        if hi <= r_in * (1 + CONTACT_TOL):
            eps = max(eps, hi)
        if lo >= r_out * (1 - CONTACT_TOL):
            big = min(big, lo)
    if abs(eps - r_in) <= CONTACT_TOL * r_in:
        eps = r_in
    if abs(big - r_out) <= CONTACT_TOL * r_out:
        big = r_out
    if eps == 0.0 and math.isinf(big):
        raise BetaError("enlargement produced the punctured plane")
    return Annulus.from_radii(zeta, eps, big)


def full_report(dom: Domain, z) -> BetaReport:
    rep = beta_at(dom, z)
    if rep.value <= 0:
        return rep
    return BetaReport(rep.value, rep.zeta, rep.xi, rep.delta,
                      bp_annulus(dom, z, rep), enlarged_annulus(dom, z, rep))


def bp_annuli_inside(dom: Domain, z, upsilon: float) -> bool:
    """Whether A(zeta; delta(z), upsilon) lies in the domain for every zeta in B(z)."""
    nbs = dom.nearest_boundary_points(as_point(z))
    for zeta, _ in nbs.witnesses:
        if not dom.annulus_in_domain(Annulus.proper(zeta, nbs.distance, upsilon)).inside:
            return False
    return True


def bpep_bounds(a: Annulus, z) -> tuple[float, float]:
    """Predicted beta window at z for an annulus with both circles on the boundary."""
    if not a.is_proper:
        raise BetaError("the window needs a proper annulus")
    r = a.half_modulus
    if not r > LOG16:
        raise BetaError(f"half modulus {r} must exceed log 16")
    z = as_point(z)
    t = math.log(abs(z - a.center) / a.center_radius)
    if abs(t) > r - LOG16 + 1e-12:
        raise BetaError(f"|t| = {abs(t):.6g} exceeds r - log 16 = {r - LOG16:.6g}")
    gap = r - abs(t)
    upper = 2.0 * gap if t >= 0 else gap + math.log(2.0)
    return 0.5 * gap, upper
