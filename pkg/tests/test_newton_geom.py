import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from conftest import TREFOIL, PRODUCT, P
from mixedsing.newton_geom import (GeometryError, build_Dv, diagram_from_functionals,
                                   find_inner_extension, minkowski_sum, newton_boundary, newton_boundary_of,
                                   support_above)
from mixedsing.poly_core import REAL, support

A, B, C, D_, E = (8, 0, 0), (6, 0, 2), (0, 1, 8), (1, 5, 2), (1, 7, 0)
J2 = [(F(2, 11), F(3, 11)), (F(1, 4), F(1, 4))]


def vset(R):
    return {tuple(int(x) if x.denominator == 1 else x for x in v) for v in R.vertices}


def lp_is_vertex(S, p):
    """p is a vertex of conv(S) + R^n_{>=0}: some strictly positive w has p as unique minimiser (LP oracle)."""
    n = len(p)
    others = [q for q in S if q != p]
    # maximise t subject to <w, q - p> >= t for all q, w >= 1/1000, sum w = 1
    A_ub = [[-(a - b) for a, b in zip(q, p)] + [1] for q in others]
    res = linprog(c=[0] * n + [-1], A_ub=A_ub, b_ub=[0] * len(others), A_eq=[[1] * n + [0]], b_eq=[1],
                  bounds=[(1e-3, None)] * n + [(None, 1)], method="highs")
    return res.status == 0 and -res.fun > 1e-9


class TestNewtonBoundary:
    def test_product_vertices_contain_named_points(self):
        R = newton_boundary_of(P(PRODUCT, 3, REAL))
        assert {A, B, C, D_, E} <= vset(R)

    def test_product_vertices_match_lp_oracle(self):
        S = sorted(support(P(PRODUCT, 3, REAL)))
        oracle = {p for p in S if lp_is_vertex(S, p)}
        assert vset(newton_boundary_of(P(PRODUCT, 3, REAL))) == oracle
        # (0,3,6) comes from x2^3 x3^6 and is extremal
        assert (0, 3, 6) in oracle

    def test_product_face_abde(self):
        R = newton_boundary_of(P(PRODUCT, 3, REAL))
        face, d = R.face_of_weight((1, 1, 1))
        assert d == 8 and set(face.vertices) == {A, B, D_, E}

    def test_product_face_bcd_plane(self):
        R = newton_boundary_of(P(PRODUCT, 3, REAL))
        w = np.cross(np.subtract(C, B), np.subtract(D_, B))
        w = tuple(int(x) for x in -w // np.gcd.reduce(w))
        assert w == (6, 6, 5)
        face, d = R.face_of_weight(w)
        assert set(face.vertices) == {B, C, D_} and d == 46

    def test_plane_cubic(self):
        R = newton_boundary([(3, 0), (1, 1), (0, 3)])
        assert len(R.compact_facets) == 2 and R.convenient

    def test_single_point(self):
        R = newton_boundary([(1, 1)])
        assert not R.convenient and vset(R) == {(1, 1)}
        assert R.inner_faces()[0].vertices == ((1, 1),)

    def test_principal_weights_trefoil_support(self):
        assert newton_boundary_of(P(TREFOIL, 2)).principal_weights() == [(3, 1), (2, 3), (1, 2)]

    def test_principal_weights_brute_force(self):
        S = sorted(support(P(TREFOIL, 2)))
        normals = set()
        for p, q in itertools.combinations(S, 2):
            w = (abs(q[1] - p[1]), abs(q[0] - p[0]))
            if min(w) == 0 or (q[0] - p[0]) * (q[1] - p[1]) > 0:
                continue
            if all(w[0] * r[0] + w[1] * r[1] >= w[0] * p[0] + w[1] * p[1] for r in S):
                g = np.gcd(*w)
                normals.add((w[0] // g, w[1] // g))
        assert set(newton_boundary_of(P(TREFOIL, 2)).principal_weights()) == normals

    def test_face_of_weight_trefoil(self):
        face, d = newton_boundary_of(P(TREFOIL, 2)).face_of_weight((2, 3))
        assert d == 11 and set(face.vertices) == {(4, 1), (1, 3)}


class TestDiagrams:
    def test_trefoil_functionals(self):
        D = diagram_from_functionals(J2)
        assert vset(D) == {(F(11, 2), 0), (1, 3), (0, 4)}
        assert D.principal_weights() == [(1, 1), (2, 3)]
        assert len(D.inner_faces()) == 3

    def test_simplex_slice(self):
        D = diagram_from_functionals([(1, 1)])
        assert vset(D) == {(1, 0), (0, 1)}
        assert len(D.inner_faces()) == 1

    def test_two_functional_diagram(self):
        D = diagram_from_functionals([(F(1, 8),) * 3, (F(6, 46), F(6, 46), F(5, 46))])
        assert {(6, 0, 2), (0, 6, 2), (0, 0, F(46, 5)), (0, 8, 0), (8, 0, 0)} == vset(D)

    def test_redundant_reported(self):
        D = diagram_from_functionals([(1, 1), (F(1, 2), F(1, 2))])
        assert len(D.functionals) == 1 and len(D.redundant) == 1

    def test_rejects_nonpositive(self):
        with pytest.raises(GeometryError):
            diagram_from_functionals([(1, 0)])
        with pytest.raises(GeometryError):
            diagram_from_functionals([])

    def test_generator_idempotence(self):
        for D in (diagram_from_functionals(J2), newton_boundary_of(P(PRODUCT, 3, REAL))):
            for face in D.faces:
                back, _ = D.face_of_weight(face.generator)
                assert set(back.vertices) == set(face.vertices)

    def test_inner_flag_definition(self):
        D = newton_boundary_of(P(PRODUCT, 3, REAL))
        for face in D.faces:
            assert face.inner == all(any(v[i] > 0 for v in face.vertices) for i in range(3))


class TestMinkowski:
    def test_identity(self):
        D = diagram_from_functionals(J2)
        S = minkowski_sum([D])
        assert S.total == D

    def test_simplex_levels(self):
        D1 = diagram_from_functionals([(1, 1, 1)])
        D3 = diagram_from_functionals([(F(1, 3),) * 3])
        S = minkowski_sum([D1, D3])
        assert [l.w for l in S.total.functionals] == [(F(1, 4),) * 3]
        face = S.total.compact_facets[0]
        assert [f.dim for f in S.decompose(face)] == [2, 2]

    def test_doubled(self):
        D = diagram_from_functionals(J2)
        S = minkowski_sum([D, D])
        v = next(f for f in S.total.faces if f.vertices == ((2, 6),))
        assert [p.vertices for p in S.decompose(v)] == [((1, 3),), ((1, 3),)]

    @settings(max_examples=60, deadline=None)
    @given(st.tuples(st.integers(1, 9), st.integers(1, 9)))
    def test_degree_additive(self, w):
        D1 = diagram_from_functionals(J2)
        D2 = newton_boundary_of(P("x1^3+x1*x2+x2^3", 2)).to_diagram()
        S = minkowski_sum([D1, D2])
        assert S.total.degree(w) == D1.degree(w) + D2.degree(w)


class TestSupportAbove:
    def test_trefoil_j1(self):
        assert support_above(support(P(TREFOIL, 2)), diagram_from_functionals([(F(2, 11), F(3, 11))]))

    def test_violation(self):
        r = support_above([(1, 0)], diagram_from_functionals([(F(1, 2), F(1, 2))]))
        assert not r and r.violations == ((1, 0),)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)).filter(any), min_size=1, max_size=6),
           st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6)), min_size=1, max_size=3))
    def test_two_forms_agree(self, S, ws):
        D = diagram_from_functionals([(F(1, a), F(1, b)) for a, b in ws])
        support_above(S, D)   # raises on disagreement

    def test_own_boundary(self):
        S = support(P(TREFOIL, 2))
        assert support_above(S, newton_boundary(S).to_diagram())


class TestInnerExtension:
    def brute(self, D, w):
        vals = [sum(a * b for a, b in zip(w, v)) for v in D.vertices]
        return min(vals)

    def test_fixed_point(self):
        D = diagram_from_functionals(J2)
        ext = find_inner_extension(D, (2, 3))
        assert ext.w == ext.q_prime == (2, 3) and ext.theta_prime.inner

    def test_trefoil_axis(self):
        D = diagram_from_functionals(J2)
        ext = find_inner_extension(D, (1, 0))
        assert ext.theta == ((F(11, 2), 0),)
        assert ext.theta_prime.inner and ext.w[0] == 1 and ext.w[1] < ext.q_prime[1]
        assert ext.degree == F(11, 2) == self.brute(D, ext.w)
        assert set(ext.theta_prime.vertices) == {(F(11, 2), 0), (1, 3)}

    def test_segment(self):
        D = diagram_from_functionals([(1, 1)])
        ext = find_inner_extension(D, (2, 0))
        assert ext.w == (2, 2) and len(ext.theta_prime.vertices) == 2

    @settings(max_examples=40, deadline=None)
    @given(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)).filter(any))
    def test_postconditions_two_functional_diagram(self, q):
        D = diagram_from_functionals([(F(1, 8),) * 3, (F(6, 46), F(6, 46), F(5, 46))])
        ext = find_inner_extension(D, q)
        I = [i for i in range(3) if q[i]]
        assert all(ext.q_prime[i] == q[i] for i in I)
        assert ext.theta_prime.inner
        assert self.brute(D, ext.w) == ext.degree
        on_I = [v for v in D.vertices if all(v[k] == 0 for k in range(3) if k not in I)]
        assert ext.degree == min(sum(q[i] * v[i] for i in I) for v in on_I)
        assert all(ext.w[i] <= ext.q_prime[i] for i in range(3))

    def test_missing_subspace(self):
        with pytest.raises(GeometryError):
            find_inner_extension(diagram_from_functionals(J2), (0, 0))


class TestDv:
    f = P(PRODUCT, 3, REAL)

    def test_v_0_9_10_passes(self):
        r = build_Dv(self.f, (0, 9, 10))
        assert r.axis_ok and r.nonconvenient == (2, 3)

    @pytest.mark.parametrize("v2", [F(17, 2), F(33, 4), F(35, 4)])
    def test_condition_iv_fails_between_8_and_9(self, v2):
        r = build_Dv(self.f, (0, v2, 10))
        fill = next(x for x in r.fills if x.i == 2)
        assert not fill.axis_ok and not r.axis_ok
        # generators of the 2-faces at the filled axis point, from exact cross products
        top = (0, v2, 0)
        for face in (fc for fc in fill.faces if fc.dim == 2):
            a, b = [np.array(v, dtype=object) - np.array(top, dtype=object) for v in face.vertices if v != top][:2]
            n = np.cross(a, b)
            n = n if n[1] > 0 else -n
            assert all(F(x) * n[1] == F(y) * face.generator[1] for x, y in zip(face.generator, n))

    @pytest.mark.parametrize("v2", [F(17, 2), F(35, 4), F(10)])
    def test_fill_weight_with_c_as_q(self, v2):
        # without x2^3 x3^6 the lowest Gamma point on the (x2,x3)-plane is C and the fill weight is (v2-7, 1, (v2-1)/8)
        g = self.f - P("x2^3*x3^6", 3, REAL)
        fill = next(x for x in build_Dv(g, (0, v2, 10)).fills if x.i == 2)
        assert fill.q == C
        assert fill.fill_weight == (v2 - 7, 1, (v2 - 1) / 8)

    def test_convenient_is_own_boundary(self):
        g = P("x1^2+x2^3+x3^4", 3, REAL)
        r = build_Dv(g)
        assert r.nonconvenient == () and r.diagram == newton_boundary_of(g)

    def test_auto_mode_meets_condition(self):
        r = build_Dv(self.f)
        assert r.axis_ok
