import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhgeo.geom import (Annulus, Circle, Degeneracy, GeometryError, PathPolyline, annuli_intersect, band,
                        circle_roots, core, crossing_count, first_in_closure, is_concentric_subannulus,
                        separates)

radii = st.floats(0.05, 20.0)
mods = st.floats(0.05, 5.0)


def test_core_example():
    a = Annulus.from_radii(0, 1, 8)
    assert core(a, math.log(2)).isclose(Annulus.from_radii(0, 2, 4))


def test_core_needs_room():
    with pytest.raises(GeometryError):
        core(Annulus.proper(0, 1, 1.0), 1.0)


def test_degenerate_core_and_band():
    d = Annulus.punctured_disk(0, 1.0)
    assert core(d, 1.0).outer_radius == pytest.approx(math.exp(-1))
    assert band(d, 1.0).outer_radius == pytest.approx(math.e)
    c = Annulus.disk_complement(0, 1.0)
    assert core(c, 2.0).inner_radius == pytest.approx(math.exp(2))
    assert Annulus.from_radii(0, 0, 2.0).kind is Degeneracy.PUNCTURED_DISK
    with pytest.raises(GeometryError):
        Annulus.from_radii(0, 0, math.inf)


@given(radii, mods, st.floats(0.01, 3.0))
def test_band_inverts_core(d, m, q):
    a = Annulus.proper(1 + 2j, d, m + q)
    assert band(core(a, q), q).isclose(a, 1e-9)
    assert is_concentric_subannulus(core(a, q), a)


def test_band_of_circle():
    a = band(Circle(0j, 2.0), 0.5)
    assert a.inner_radius == pytest.approx(2 * math.exp(-0.5))
    assert a.modulus() == pytest.approx(1.0)


def test_separates():
    a = Annulus.from_radii(0, 1, 2)
    assert separates(a, 0.5, 3)
    assert not separates(a, 0.5, 0.7j)
    assert not separates(a, 1.5, 3)
    # a punctured disk separates only its center from the outside
    p = Annulus.punctured_disk(0, 1)
    assert separates(p, 0, 2)
    assert not separates(p, 0.5, 2)


def _sample_annulus(a, n=60):
    r = np.exp(np.linspace(a.log_inner, a.log_outer, n + 2)[1:-1])
    th = np.linspace(-math.pi, math.pi, 4 * n, endpoint=False)
    return (a.center + r[:, None] * np.exp(1j * th)[None, :]).ravel()


@given(st.complex_numbers(max_magnitude=3), radii, mods, radii, mods)
def test_annuli_intersect_against_sampling(c, d1, m1, d2, m2):
    a1 = Annulus.proper(0, d1, m1)
    a2 = Annulus.proper(c, d2, m2)
    pts = _sample_annulus(a1)
    u = np.log(np.abs(pts - a2.center))
    sampled = bool(np.any((u > a2.log_inner) & (u < a2.log_outer)))
    if sampled:
        assert annuli_intersect(a1, a2)
    assert annuli_intersect(a1, a2) == annuli_intersect(a2, a1)


def test_annuli_disjoint_concentric():
    assert not annuli_intersect(Annulus.from_radii(0, 1, 2), Annulus.from_radii(0, 2, 3))
    assert annuli_intersect(Annulus.from_radii(0, 1, 2.1), Annulus.from_radii(0, 2, 3))


def test_circle_roots():
    ts = circle_roots(-2 + 0j, 2 + 0j, 0j, 1.0)
    assert ts == pytest.approx((0.25, 0.75))
    assert circle_roots(-2 + 2j, 2 + 2j, 0j, 1.0) == ()


def test_first_in_closure_and_crossings():
    a = Annulus.from_radii(0, 1, 2)
    s, z = first_in_closure(np.array([3.0, 0.5]), a)
    assert z == pytest.approx(2.0)
    assert s == pytest.approx(0.4)
    s, z = first_in_closure(np.array([3.0, 0.5]), a, reverse=True)
    assert z == pytest.approx(1.0)
    assert crossing_count(a, [3.0, 0.5]) == 1
    assert crossing_count(a, [3.0, 0.5, 3j]) == 2
    assert crossing_count(a, [1.5, 1.5j]) == 0
    assert first_in_closure([3.0, 4.0], a) is None


class TestPolyline:
    def test_validation(self):
        with pytest.raises(GeometryError):
            PathPolyline([1.0])
        with pytest.raises(GeometryError):
            PathPolyline([1.0, 1.0, 2.0])
        with pytest.raises(GeometryError):
            PathPolyline([1.0, complex(math.nan, 0)])
        assert len(PathPolyline.dedup([1.0, 1.0, 2.0])) == 2

    def test_params(self):
        p = PathPolyline([0, 1, 1 + 1j])
        assert p.point_at(1.5) == pytest.approx(1 + 0.5j)
        assert p.euclidean_length() == pytest.approx(2.0)
        sub = p.subpath(0.5, 1.5)
        assert sub.start == pytest.approx(0.5) and sub.end == pytest.approx(1 + 0.5j)
        assert sub.euclidean_length() == pytest.approx(1.0)
        assert p.param_at_arclength(1.5) == pytest.approx(1.5)
        assert p.reversed().start == p.end
        assert p.concat(PathPolyline([1 + 1j, 2j])).end == 2j

    @given(st.lists(st.complex_numbers(max_magnitude=10), min_size=2, max_size=8, unique=True),
           st.floats(0, 1), st.floats(0, 1))
    def test_subpath_lengths_add(self, pts, x, y):
        p = PathPolyline.dedup(pts) if len(set(pts)) > 1 else None
        if p is None or len(p) < 2:
            return
        n = p.n_segments
        s0, s1 = sorted((x * n, y * n))
        if s1 - s0 < 1e-9:
            return
        total = p.subpath(0, s0).euclidean_length() if s0 > 1e-9 else 0.0
        total += p.subpath(s0, s1).euclidean_length()
        total += p.subpath(s1, n).euclidean_length() if n - s1 > 1e-9 else 0.0
        assert total == pytest.approx(p.euclidean_length(), rel=1e-9, abs=1e-9)
