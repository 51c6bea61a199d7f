import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qhgeo.beta import (BetaError, beta_at, beta_many, bp_annuli_inside, bp_annulus, bpep_bounds,
                        enlarged_annulus, full_report)
from qhgeo.domains import (DomainError, LinePrimitive, annulus_domain,
                           half_plane, point_complement, punctured_plane, punctured_unit_disk,
                           twice_punctured_plane, unit_disk)
from qhgeo.geom import Annulus, Degeneracy


def _grid_oracle(dom, z):
    """beta from a polar grid about each nearest boundary point, kept where z is not in the domain."""
    nbs = dom.nearest_boundary_points(z)
    d = np.geomspace(1e-5, 200, 1200)
    th = np.linspace(-math.pi, math.pi, 360, endpoint=False)
    best = math.inf
    for zeta in nbs.points:
        w = zeta + (d[:, None] * np.exp(1j * th)[None, :]).ravel()
        w = np.concatenate([w[~dom.contains_many(w)], dom.complement_points])
        dist = np.abs(w - zeta)
        dist = dist[dist > 1e-12]
        best = min(best, float(np.min(np.abs(np.log(nbs.distance / dist)))))
    return best


def beta_oracle(dom, z, cloud):
    nbs = dom.nearest_boundary_points(z)
    best = math.inf
    for zeta in nbs.points:
        d = np.abs(cloud - zeta)
        d = d[d > 1e-12]
        best = min(best, float(np.min(np.abs(np.log(nbs.distance / d)))))
    return best


@st.composite
def punctures(draw):
    n = draw(st.integers(2, 5))
    pts = draw(st.lists(st.complex_numbers(max_magnitude=3), min_size=n, max_size=n))
    assume(min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]) > 1e-2)
    return pts


@given(punctures(), st.complex_numbers(max_magnitude=4))
def test_beta_matches_bruteforce_on_point_sets(pts, z):
    dom = point_complement(pts)
    assume(dom.delta(z) > 1e-3) if dom.contains(z) else assume(False)
    cloud = np.array(pts, dtype=complex)
    assert beta_at(dom, z).value == pytest.approx(beta_oracle(dom, z, cloud), abs=1e-12)
    assert float(beta_many(dom, np.array([z]))[0]) == pytest.approx(beta_at(dom, z).value, abs=1e-12)


@pytest.mark.parametrize("dom", [punctured_unit_disk(), annulus_domain(0.3j, 1.5, 1.2), unit_disk(),
                                 half_plane(1j, 1 + 1j)],
                         ids=["dstar", "annulus", "disk", "half_plane"])
def test_beta_matches_sampled_complement(dom):
    rng = np.random.default_rng(5)
    z = rng.uniform(-3, 3, 400) + 1j * rng.uniform(-3, 3, 400)
    z = z[dom.contains_many(z)][:40]
    assert z.size >= 10
    for w in z:
        assert beta_at(dom, w).value == pytest.approx(_grid_oracle(dom, w), abs=2e-2)


def test_witness_realises_beta():
    dom = point_complement([0, 0.3 + 0.1j, 2, -1j])
    for z in [0.1 + 0.05j, 1.2, -0.5 + 0.5j]:
        rep = beta_at(dom, z)
        assert abs(rep.zeta - z) == pytest.approx(rep.delta)
        assert abs(math.log(rep.delta / abs(rep.zeta - rep.xi))) == pytest.approx(rep.value)


class TestExamples:
    def test_dstar(self):
        rep = full_report(punctured_unit_disk(), 0.1)
        assert rep.value == pytest.approx(math.log(10), rel=1e-12)
        assert rep.zeta == 0 and abs(rep.xi) == pytest.approx(1.0)

    def test_dstar_radial_formula(self):
        dom = punctured_unit_disk()
        r = np.geomspace(1e-6, 0.49, 50)  # at 1/2 the circle is as near as 0
        np.testing.assert_allclose(beta_many(dom, r * np.exp(0.7j)), -np.log(r), rtol=1e-12)

    def test_twice_punctured_quarter(self):
        dom = twice_punctured_plane()
        rep = full_report(dom, 0.25)
        assert rep.value == pytest.approx(math.log(4), rel=1e-12)
        assert rep.bp_annulus.isclose(Annulus.from_radii(0, 1 / 16, 1))
        assert rep.enlarged.kind is Degeneracy.PUNCTURED_DISK
        assert rep.enlarged.outer_radius == pytest.approx(1.0)
        assert rep.enlarged.center == 0

    def test_twice_punctured_minus_one(self):
        rep = beta_at(twice_punctured_plane(), -1)
        assert rep.value == 0.0
        with pytest.raises(BetaError):
            bp_annulus(twice_punctured_plane(), -1)

    def test_three_punctures_nearest_zero(self):
        dom = point_complement([0, 0.01, 1])
        rep = full_report(dom, -0.25)
        assert rep.value == pytest.approx(math.log(4))
        assert rep.enlarged.isclose(Annulus.from_radii(0, 0.01, 1))

    def test_three_punctures_nearest_off_origin(self):
        dom = point_complement([0, 0.01, 1])
        rep = full_report(dom, 0.25)
        assert rep.zeta == pytest.approx(0.01)
        assert rep.value == pytest.approx(math.log(0.99 / 0.24))
        assert rep.enlarged.isclose(Annulus.from_radii(0.01, 0.01, 0.99))

    def test_enlarged_contains_bp_and_touches_boundary(self):
        dom = point_complement([0, 0.002, -0.3j, 5])
        for z in [0.01, 0.04 + 0.02j, 1 + 1j]:
            rep = full_report(dom, z)
            e = rep.enlarged
            assert e.log_inner <= rep.bp_annulus.log_inner + 1e-12
            assert e.log_outer >= rep.bp_annulus.log_outer - 1e-12
            assert dom.annulus_in_domain(e).inside
            radii = [abs(p - e.center) for p in dom.complement_points if p != e.center]
            assert any(abs(r - e.outer_radius) < 1e-9 for r in radii)

    def test_plane_minus_point_enlarges_to_nothing(self):
        # beta needs two complement points
        with pytest.raises(DomainError):
            beta_at(punctured_plane(), 1)


class TestBPEP:
    def test_window(self):
        a = Annulus.proper(0, 1, 5)
        lo, hi = bpep_bounds(a, 1)
        assert (lo, hi) == pytest.approx((2.5, 10.0))
        lo, hi = bpep_bounds(a, math.exp(-1))
        assert (lo, hi) == pytest.approx((2.0, 4 + math.log(2)))

    def test_beta_inside_window(self):
        dom = point_complement([0, math.exp(-5), math.exp(5)])
        a = Annulus.proper(0, 1, 5)
        r = a.half_modulus - math.log(16)
        for t in np.linspace(-r, r, 41):
            z = math.exp(t) * np.exp(0.3j)
            lo, hi = bpep_bounds(a, z)
            assert lo <= beta_at(dom, z).value <= hi

    def test_rejects_thin_annulus(self):
        with pytest.raises(BetaError):
            bpep_bounds(Annulus.proper(0, 1, 2.5), 1)

    def test_rejects_point_outside_core(self):
        with pytest.raises(BetaError):
            bpep_bounds(Annulus.proper(0, 1, 5), math.exp(3))

    def test_rejects_degenerate(self):
        with pytest.raises(BetaError):
            bpep_bounds(Annulus.punctured_disk(0, 1), 0.5)


def test_bp_annuli_inside():
    dom = point_complement([0, 0.01, 1])
    assert bp_annuli_inside(dom, -0.25, 1.0)
    assert not bp_annuli_inside(dom, -0.25, 2.0)


def test_beta_vanishes_on_half_plane():
    dom = half_plane(0, 1)
    rep = beta_at(dom, 1j)
    assert rep.value == 0.0
    with pytest.raises(BetaError):
        enlarged_annulus(dom, 1j)
    assert isinstance(dom.primitives[0], LinePrimitive)
