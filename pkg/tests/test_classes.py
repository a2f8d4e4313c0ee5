from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import SIKND_ONLY, TREFOIL, TREFOIL_FACE, NOT_NICE, P, mixed_polys
from mixedsing.classes import (GammaInnError, admissible, check_semi, detect_weight_type, gamma_inn,
                               semi_passes)
from mixedsing.newton_geom import diagram_from_functionals, newton_boundary_of, support_above
from mixedsing.nondegen import PreconditionError, check_map
from mixedsing.poly_core import REAL, MixedPolynomial, radial_weight_check, support

J2 = [(F(2, 11), F(3, 11)), (F(1, 4), F(1, 4))]


def types(f):
    return {(wt.w, wt.d, wt.radial) for wt in detect_weight_type(f)}


class TestWeightType:
    def test_siknd_only_type(self):
        assert ((1, 2, 3), (12,), False) in types(P(SIKND_ONLY, 3, REAL))

    def test_wh_face_face_radial(self):
        assert ((2, 3), (11,), True) in types(P(TREFOIL_FACE, 2))

    def test_two_monomials(self):
        assert ((3, 2), (6,), False) in types(P("x1^2+x2^3", 2))

    def test_not_homogeneous(self):
        assert detect_weight_type(P("x1^2+x1^3+x2", 2)) == []

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            detect_weight_type(P("x1-x1", 2))

    @settings(max_examples=40, deadline=None)
    @given(mixed_polys(n=2, max_terms=4, max_exp=6))
    def test_candidates_pass_scaling(self, f):
        # f(t^w x) = t^d f(x) for positive t, on random points
        rng = np.random.default_rng(3)
        X = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        for wt in detect_weight_type(f):
            assert radial_weight_check(f, wt.w) == wt.d[0]
            t = 1.7
            lhs = f.evaluate_batch(X * t ** np.array(wt.w))
            assert np.allclose(lhs, t ** float(wt.d[0]) * f.evaluate_batch(X))


class TestSemi:
    def test_wh_face_srwh(self):
        rep = check_semi(P(TREFOIL_FACE, 2), (2, 3))
        assert rep.flavor == "SRWH" and rep.overall == "pass" and rep.notes["degrees"] == ["11"]

    def test_trefoil_full_is_srwh(self):
        rep = check_semi(P(TREFOIL, 2), (2, 3))
        assert semi_passes(rep) and rep.notes["higher_degrees"] == ["12"]

    def test_siknd_only_swh_zero_higher_part(self):
        rep = check_semi(P(SIKND_ONLY, 3, REAL), (1, 2, 3))
        assert rep.flavor == "SWH" and semi_passes(rep)
        assert rep.notes["higher_degrees"] == ["inf"]
        assert rep.notes["sigma_zero"] != "fail"

    def test_sum_of_squares(self):
        rep = check_semi(P("x1^2+x2^2", 2), (1, 1))
        assert rep.overall == "pass" and rep.notes["degrees"] == ["2"]

    def test_wrong_weight_fails(self):
        # lowest part x1^2 vanishes identically on the x2-axis stratum
        rep = check_semi(P("x1^2+x2^3", 2), (1, 1))
        assert rep.overall == "fail" and not semi_passes(rep)

    def test_cusp_square_degenerate(self):
        rep = check_semi(P("(x1^3-x2^2)^2", 2, REAL), (2, 3))
        assert rep.notes["sigma_zero"] == "fail"

    def test_bad_weight(self):
        with pytest.raises(PreconditionError):
            check_semi(P("x1", 2), (0, 1))

    @settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(st.integers(1, 3), st.integers(1, 3), mixed_polys(n=2, max_terms=3, max_exp=8))
    def test_semi_implies_iknd(self, a, b, extra):
        # x1^(b k) + x2^(a k) is weighted homogeneous for (a, b); higher terms of extra are kept
        w = (a, b)
        lead = P(f"x1^{2 * b}+2*x2^{2 * a}", 2)
        d = 2 * a * b
        high = {k: c for k, c in extra.items()
                if sum(wi * (n + m) for wi, n, m in zip(w, k[0], k[1])) > d}
        f = lead + MixedPolynomial(2, high) if high else lead
        rep = check_semi(f, w)
        if not semi_passes(rep):
            return
        D = diagram_from_functionals([tuple(F(wi, d) for wi in w)])
        assert check_map(f, "IKND", [D]).overall != "fail"


class TestGammaInn:
    def test_trefoil(self):
        g = gamma_inn(P(TREFOIL, 2))
        assert g.diagram.vertices == diagram_from_functionals(J2).vertices
        assert g.principal == [(1, 1), (2, 3)]
        assert g.maximal

    def test_not_nice_is_newton_boundary(self):
        f = P(NOT_NICE, 2)
        g = gamma_inn(f)
        assert g.diagram.vertices == newton_boundary_of(f).to_diagram().vertices
        assert g.report.overall != "fail"

    def test_sum_of_squares(self):
        g = gamma_inn(P("x1^2+x2^2", 2))
        assert g.diagram.vertices == ((0, 2), (2, 0))

    def test_lowered_trefoil_diagram_rejected(self):
        # the convenient completion of the face has an empty vertex and must fail
        D = diagram_from_functionals([(F(1, 4), F(1, 4))])
        ok, rep, why = admissible(P(TREFOIL, 2), D)
        assert not ok

    def test_three_variables_rejected(self):
        with pytest.raises(PreconditionError):
            gamma_inn(P("x1+x2+x3", 3))

    def test_no_admissible(self):
        with pytest.raises(GammaInnError):
            gamma_inn(P("x1^2-~x1^2+x2^3", 2))

    @settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(mixed_polys(n=2, max_terms=4, max_exp=5))
    def test_result_invariants(self, f):
        try:
            g = gamma_inn(f)
        except GammaInnError:
            return
        assert support_above(support(f), g.diagram)
        assert g.report.overall != "fail"
        B = newton_boundary_of(f)
        if B.convenient:
            ok, _, _ = admissible(f, B.to_diagram())
            if ok:
                assert all(g.diagram.contains(v) for v in B.vertices)
