import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from qhgeo.analysis import (AbcParams, CertificationError, DecompositionConfig, DecompositionError,
                            STRUCTURAL_CHECKS, SuiteConfig, abc_check, certify_bad_arc_ratios,
                            certify_length_comparison, decompose_good_bad, dive_path, random_points,
                            run_suite, stability_gap, thinness_estimate)
from qhgeo.beta import beta_at
from qhgeo.domains import (point_complement, punctured_plane, punctured_unit_disk, twice_punctured_plane,
                           unit_disk)
from qhgeo.geodesics import chi_path, exact_geodesic, spiral_points
from qhgeo.geom import Annulus, Degeneracy, core, separates
from qhgeo.metrics import H, K


def abc_excursion_oracle(v, o, mu, levels=1500, dense=8000):
    """Largest excursion beyond mu over all circles S(o; e^lam), by level-set sweep on a dense resampling."""
    v = np.asarray(v, dtype=complex)
    seg = np.abs(np.diff(v))
    s = np.concatenate([[0], np.cumsum(seg)])
    t = np.linspace(0, s[-1], dense)
    z = np.interp(t, s, v.real) + 1j * np.interp(t, s, v.imag)
    u = np.log(np.abs(z - o))
    worst = -math.inf
    for lam in np.linspace(u.min(), u.max(), levels):
        cross = np.nonzero(np.diff(np.sign(u - lam)) != 0)[0]
        if cross.size < 2:
            continue
        w = u[cross[0]:cross[-1] + 2]
        worst = max(worst, w.max() - lam - mu, lam - w.min() - mu)
    return worst


class TestAbc:
    def test_doubled_radial_path_fails_by_three(self):
        dom = punctured_plane()
        rep = abc_check(dom, K, [1, math.exp(math.pi + 3), 1j], AbcParams.quasihyperbolic())
        assert not rep.passed
        assert rep.violation["excursion"] == pytest.approx(3.0, rel=1e-9)
        assert rep.violation["center"] == [0.0, 0.0]

    def test_spiral_passes(self):
        g = exact_geodesic(punctured_plane(), K, 1, math.exp(5) * 1j)
        assert abc_check(punctured_plane(), K, g.path, AbcParams.quasihyperbolic()).passed

    @settings(max_examples=25)
    @given(st.lists(st.complex_numbers(min_magnitude=0.05, max_magnitude=20), min_size=2, max_size=5))
    def test_agrees_with_level_sweep(self, pts):
        dom = punctured_plane()
        assume(dom.path_inside(pts) and all(abs(p - q) > 1e-3 for p, q in zip(pts, pts[1:])))
        params = AbcParams(1.0, 0.5)
        exc = abc_excursion_oracle(pts, 0j, params.mu)
        assume(abs(exc) > 0.05)
        assert abc_check(dom, K, pts, params).passed == (exc < 0)

    def test_inadmissible_levels_are_skipped(self):
        # every circle about 0 that meets the path passes within e^0.45 of the puncture at 1
        dom = twice_punctured_plane()
        path = [0.67, 1.4 + 0.3j, 0.7 - 0.2j]
        params = AbcParams(0.45, 0.45)
        assert abc_check(dom, K, path, params, centers=[0]).passed
        assert abc_excursion_oracle(path, 0j, params.mu) > 0.2
        assert not abc_check(punctured_plane(), K, path, params).passed

    def test_params_validation(self):
        with pytest.raises(ValueError):
            AbcParams(0.1, 0.2)

    def test_hyperbolic_constants(self):
        p = AbcParams.hyperbolic()
        assert p.mu == pytest.approx(3 * 4.37687923045295) and p.nu == 2.5


class TestDecomposition:
    def test_config_defaults(self):
        cfg = DecompositionConfig.default()
        assert cfg.mu == pytest.approx(7 * math.e)
        assert (cfg.S, cfg.M, cfg.L, cfg.XL) == pytest.approx((70 * math.e, 700 * math.e, 7000 * math.e,
                                                              70000 * math.e))
        big = DecompositionConfig.default(4.0)
        assert big.mu == pytest.approx(7 * math.exp(4))
        with pytest.raises(ValueError):
            DecompositionConfig(1.0, 1.0, S=3, M=2)
        with pytest.raises(ValueError):
            DecompositionConfig(0.5)

    def test_positive_case(self):
        eps = math.exp(-26)
        dom = point_complement([0, eps, 1])
        path = -np.exp(np.linspace(math.log(eps / 2), math.log(0.5), 600))
        rep = decompose_good_bad(dom, path, cfg=DecompositionConfig.desk())
        assert rep.n == 1
        assert rep.structural_pass, rep.checks
        assert rep.checks["not_punctured"] and rep.checks["good_comparability"]
        A = rep.annuli[0]
        assert A.isclose(Annulus.from_radii(0, eps, 1))
        z = complex(*rep.crossings[0]["point"])
        assert beta_at(dom, z).value == pytest.approx(12.0, abs=1e-6)
        assert separates(core(A, 2.0), path[0], path[-1])
        # markers alternate a_0 <= b_0 <= a_1 <= b_1
        assert rep.markers["h"] == sorted(rep.markers["h"])

    def test_negative_case_flags_degenerate(self):
        dom = twice_punctured_plane()
        rep = decompose_good_bad(dom, dive_path(dom, 14.0), cfg=DecompositionConfig.desk())
        assert rep.n == 1
        assert rep.annuli[0].kind is Degeneracy.PUNCTURED_DISK
        assert not rep.checks["not_punctured"]
        assert any("degenerate" in f for f in rep.flags)

    def test_no_crossings_is_all_good(self):
        dom = twice_punctured_plane()
        rep = decompose_good_bad(dom, [0.5j, -0.5 + 0.5j], cfg=DecompositionConfig.desk())
        assert rep.n == 0 and rep.structural_pass
        assert rep.good_subarcs["h"] == [[0.0, 1.0]]

    def test_endpoint_beta_above_S(self):
        dom = twice_punctured_plane()
        with pytest.raises(DecompositionError):
            decompose_good_bad(dom, [1e-3, 0.5j], cfg=DecompositionConfig.desk())

    def test_endpoint_mismatch(self):
        dom = twice_punctured_plane()
        with pytest.raises(DecompositionError):
            decompose_good_bad(dom, [0.5j, -0.5], [0.5j, -0.6], DecompositionConfig.desk())

    def test_structural_names(self):
        assert set(STRUCTURAL_CHECKS) <= set(decompose_good_bad(
            twice_punctured_plane(), [0.5j, -0.5], cfg=DecompositionConfig.desk()).checks)


class TestCertificates:
    @pytest.mark.parametrize("a,b", [(0.1, 0.8j), (0.5 + 0.3j, -0.6), (0.02, 0.9)])
    def test_dstar_ceiling(self, a, b):
        rep = certify_length_comparison(punctured_unit_disk(), a, b)
        assert rep.passed and rep.ceiling == 11.0
        assert 1 - 1e-3 <= rep.k_of_h_geodesic <= 11 * 1.02
        assert rep.h_of_k_geodesic >= 1 - 1e-3

    def test_disk_ceiling(self):
        rep = certify_length_comparison(unit_disk(), 0.1 - 0.3j, 0.7 + 0.2j)
        assert rep.passed and rep.ceiling == 2.0
        assert rep.k_of_h_geodesic <= 2.04 and rep.h_of_k_geodesic <= 2.04

    def test_same_point(self):
        assert certify_length_comparison(unit_disk(), 0.2, 0.2).passed

    def test_bad_arc(self):
        dom = point_complement([0, math.exp(-100), math.exp(100)])
        A = Annulus.proper(0, 1, 100)
        Sigma = Annulus.proper(0, 1, 1)
        rep = certify_bad_arc_ratios(dom, A, 35 * math.e, Sigma, trials=4, hyperbolic=False)
        assert rep.modulus == pytest.approx(2.0)
        assert rep.sandwich_pass and rep.kk_pass and rep.passed
        assert all(2 - 1e-9 <= d <= 2 * math.pi + 4 for d in rep.k_distances)

    def test_bad_arc_hypotheses(self):
        dom = point_complement([0, math.exp(-100), math.exp(100)])
        A = Annulus.proper(0, 1, 100)
        with pytest.raises(CertificationError):
            certify_bad_arc_ratios(dom, Annulus.proper(0, 1, 10), 35 * math.e, Annulus.proper(0, 1, 1))
        with pytest.raises(CertificationError):
            certify_bad_arc_ratios(dom, A, 35 * math.e, Annulus.proper(0.5, 1, 1))
        with pytest.raises(CertificationError):
            certify_bad_arc_ratios(dom, A, 35 * math.e, Annulus.proper(0, 1, 0.2))
        with pytest.raises(CertificationError):
            certify_bad_arc_ratios(point_complement([0, 0.5]), A, 35 * math.e, Annulus.proper(0, 1, 1))


class TestThinness:
    def test_degenerate_triangle(self):
        rep = thinness_estimate(punctured_plane(), K, [(1, 1, math.exp(2) * 1j)])
        # only the subsampling of target vertices keeps this from being exactly 0
        assert rep.max_thinness <= math.hypot(2, math.pi / 2) / 20

    def test_disk_triangles_are_thin(self):
        rng = np.random.default_rng(1)
        delta_h2 = math.log(1 + math.sqrt(2))
        for _ in range(5):
            r = 0.9 * np.sqrt(rng.uniform(0, 1, 3))
            tri = r * np.exp(1j * rng.uniform(-math.pi, math.pi, 3))
            rep = thinness_estimate(unit_disk(), H, [tuple(tri)])
            longest = max(exact_geodesic(unit_disk(), H, tri[i], tri[i - 1]).value for i in range(3))
            assert rep.max_thinness <= delta_h2 + longest / 23 + 1e-9

    def test_stability_gap_of_geodesic_is_zero(self):
        geo = spiral_points(1, 3 + 2j, 50)
        assert stability_gap(punctured_plane(), K, geo, geo) == 0.0

    def test_doubled_path_gap(self):
        for n in (2.0, 5.0):
            gap = stability_gap(punctured_plane(), K, [1, math.exp(n), 1], [1])
            assert gap == pytest.approx(n)

    def test_chi_against_spiral(self):
        a, b = 1, 4j
        gap = stability_gap(punctured_plane(), K, chi_path(a, b).vertices, spiral_points(a, b))
        assert 0 < gap < 2

    def test_endpoints_must_match(self):
        with pytest.raises(ValueError):
            stability_gap(punctured_plane(), K, [1, 2], [1, 3])


class TestSuite:
    def test_empty(self):
        rep = run_suite(punctured_unit_disk(), SuiteConfig.preset("empty"))
        assert rep.passed and rep.checks == []

    def test_dstar(self):
        rep = run_suite(punctured_unit_disk(), SuiteConfig.preset("dstar-default", samples=40, geodesics=3))
        assert rep.passed, [c.to_dict() for c in rep.checks if not c.passed]

    def test_c01_scaled(self):
        rep = run_suite(twice_punctured_plane(), SuiteConfig.preset("c01-scaled", samples=40, geodesics=3))
        assert rep.passed, [c.to_dict() for c in rep.checks if not c.passed]
        dec = next(c for c in rep.checks if c.name == "decomposition")
        assert dec.detail.get("degenerate_annulus_flag")

    def test_unknown_check(self):
        with pytest.raises(ValueError):
            run_suite(unit_disk(), SuiteConfig(checks=("nope",)))
        with pytest.raises(ValueError):
            SuiteConfig.preset("nope")

    def test_seeded(self):
        cfg = SuiteConfig(checks=("delta_lipschitz", "bp_extremal"), samples=30)
        a = run_suite(twice_punctured_plane(), cfg).to_dict()
        b = run_suite(twice_punctured_plane(), cfg).to_dict()
        assert a == b

    def test_random_points_inside(self):
        z = random_points(twice_punctured_plane(), 50, np.random.default_rng(0))
        assert z.size == 50 and twice_punctured_plane().contains_many(z).all()
