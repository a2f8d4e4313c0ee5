"""Acceptance suite: one PASS/FAIL line per criterion in the terminal summary.

Numeric checks that find no witness over the full start budget are graded
inconclusive-pass; a pass clause accepts that grade and the line says so.
"""
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import ACCEPTANCE_TITLES, SIKND_ONLY, TREFOIL, TREFOIL_FACE, NOT_NICE, NOT_NICE_22, PRODUCT, P, record
from corpus import CORPUS_SIZE, corpus
from mixedsing import nondegen
from mixedsing.classes import GammaInnError, check_semi, detect_weight_type, gamma_inn, semi_passes
from mixedsing.cli import JobConfig, render, run
from mixedsing.deform import DeformationFamily, theta_degree_ok
from mixedsing.link2 import boundary_pieces, check_nice, link_invariants, make_convenient, nested_link
from mixedsing.newton_geom import axis_condition, build_Dv, diagram_from_functionals, newton_boundary_of
from mixedsing.nondegen import CERTIFIED, NO_WITNESS, check_innd_2var, check_map, unit_roots, \
    vertex_knd_2var
from mixedsing.poly_core import REAL, ExactComplex, PolynomialMap, permutation_pairs, realify, reconstruct_mixed

ACCEPTANCE_TITLES.update({
    1: "three-variable real map: SKND witness, no SIKND witness  [< 30 s]",
    2: "product map: Newton boundary and D_v  [< 60 s]",
    3: "trefoil map: gamma_inn, pieces, nested link  [< 90 s]",
    4: "face and full link agree, SRWH ((2,3);11)  [< 60 s]",
    5: "IKND map that is not nice, vertex KND  [< 30 s]",
    6: "not nice at (2,2)  [< 10 s]",
    7: f"INND vs IKND on {CORPUS_SIZE} random polynomials  [< 3 min]",
    8: "convenient+KND => IKND, realification, 48 reconstructions  [< 3 min]",
    9: "make_convenient on the trefoil face  [< 60 s]",
    10: "byte-identical structured reports on rerun",
})

D_SIKND = diagram_from_functionals([(F(1, 12), F(1, 6), F(1, 4))])
PRODUCT_NAMED = {(8, 0, 0), (6, 0, 2), (0, 1, 8), (1, 5, 2), (1, 7, 0)}
PRODUCT_ALT = diagram_from_functionals([(F(1, 8),) * 3, (F(6, 46), F(6, 46), F(5, 46))])


class Clock:
    def __init__(self, criterion, budget):
        self.criterion, self.budget = criterion, budget

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        dt = time.perf_counter() - self.t0
        if exc[0] is None:
            record(self.criterion, f"runtime < {self.budget:g} s", dt < self.budget, f"{dt:.1f} s")
            assert dt < self.budget


def grade(rep) -> str:
    return {"pass": "pass", "inconclusive": "inconclusive-pass", "fail": "fail"}[rep.overall]


def numeric_evidence(rep) -> str:
    num = [o.verdict for o in rep.obligations if o.verdict.status == NO_WITNESS]
    if not num:
        return "all obligations certified exactly"
    return f"{len(num)} numeric obligations, samples {num[0].samples}, min residual {min(v.min_residual for v in num):.2e}"


def vset(R):
    return {tuple(int(x) for x in v) for v in R.vertices}


def doubled(D):
    return diagram_from_functionals([tuple(x for x in l.w for _ in (0, 1)) for l in D.functionals])


def sphere_map():
    s = "x1^2+x2^2+x3^2+x4^2"
    return PolynomialMap((P("2*x1", 4, REAL), P(f"2*x2*({s})", 4, REAL)))


# ---------------------------------------------------------------- 1

def test_criterion_1_sknd_vs_siknd():
    with Clock(1, 30):
        f = P(SIKND_ONLY, 3, REAL)
        rep = check_map(f, "SKND")
        obs = [o for o in rep.failures() if tuple(o.face.generator) == (2, 2, 3)]
        pt = np.array(obs[0].verdict.witness.point) if obs else None
        err = float(np.max(np.abs(pt - 1))) if obs else math.inf
        assert record(1, "SKND Degenerate on face w=(2,2,3), witness within 1e-6 of (1,1,1)",
                      rep.overall == "fail" and err <= 1e-6, f"max deviation {err:.1e}")
        srep = check_map(f, "SIKND", [D_SIKND])
        num = [o.verdict for o in srep.obligations if o.verdict.status == NO_WITNESS]
        ok = (srep.overall != "fail" and all(v.samples == 256 for v in num)
              and all(v.min_residual > 1e-4 for v in num))
        assert record(1, "SIKND w.r.t. D({(1/12,1/6,1/4)}): no witness, 256 starts, min residual > 1e-4",
                      ok, f"{grade(srep)}; {numeric_evidence(srep)}")


# ---------------------------------------------------------------- 2

def test_criterion_2_product_boundary():
    with Clock(2, 60):
        f = P(PRODUCT, 3, REAL)
        B = newton_boundary_of(f)
        assert record(2, "named vertices A..E are vertices", PRODUCT_NAMED <= vset(B))
        fails = []
        for v2 in (F(17, 2), F(33, 4), F(35, 4)):
            fill = next(x for x in build_Dv(f, (0, v2, 10)).fills if x.i == 2)
            fails.append(not fill.axis_ok)
        assert record(2, "condition (iv) fails for v2 in (8,9)", all(fails), "v2 = 17/2, 33/4, 35/4")
        r = build_Dv(f, (0, 9, 10))
        assert record(2, "v=(0,9,10) satisfies condition (iv)", r.axis_ok)
        viol = axis_condition([f], [PRODUCT_ALT])
        rep = check_map(f, "IKND", [PRODUCT_ALT])
        assert record(2, "alternative diagram: condition (iv) holds and IKND passes",
                      not viol and rep.overall != "fail", f"{grade(rep)}; {numeric_evidence(rep)}")


@pytest.mark.xfail(strict=True, reason="(0,3,6) from x2^3 x3^6 is also a vertex; see decisions ledger")
def test_criterion_2_exact_vertex_set():
    got = vset(newton_boundary_of(P(PRODUCT, 3, REAL)))
    extra = sorted(got - PRODUCT_NAMED)
    assert record(2, "vertex set is exactly {A,B,C,D,E}", got == PRODUCT_NAMED, f"extra vertices {extra}")


@pytest.mark.xfail(strict=True, reason="D=(1,5,2) lies below the plane CEG, so no face has that generator")
def test_criterion_2_dv_generator():
    v2 = F(17, 2)
    fill = next(x for x in build_Dv(P(PRODUCT, 3, REAL), (0, v2, 10)).fills if x.i == 2)
    want = (v2 - 7, 1, (v2 - 1) / 8)
    gens = []
    for face in fill.faces:
        g = [F(x) for x in face.generator]
        gens.append(tuple(x / g[1] for x in g))
    assert record(2, "Delta(2) generator is (v2-7, 1, (v2-1)/8) for v2 in (8,9)", want in gens,
                  f"at v2=17/2 faces at G have generators {[tuple(int(x) for x in fc.generator) for fc in fill.faces]}")


# ---------------------------------------------------------------- 3

def test_criterion_3_trefoil_link():
    with Clock(3, 90):
        f = P(TREFOIL, 2)
        g = gamma_inn(f)
        want = diagram_from_functionals([(F(2, 11), F(3, 11)), (F(1, 4), F(1, 4))])
        got_l = sorted(tuple(l.w) for l in g.diagram.functionals)
        assert record(3, "gamma_inn = D({(2/11,3/11),(1/4,1/4)})",
                      got_l == sorted(tuple(l.w) for l in want.functionals) and g.diagram.vertices == want.vertices)
        assert record(3, "P_inn = [(1,1),(2,3)]", g.principal == [(1, 1), (2, 3)])
        g1, h2 = boundary_pieces(f)
        ok = (g1.term_dict() == {(1, 0): {-3: ExactComplex(1)}}
              and h2.term_dict() == {(0, 1): {4: ExactComplex(1)}, (0, 3): {1: ExactComplex(1)}})
        assert record(3, "g_1 = x1 e^{-3it2}, h_2 = ~x2 e^{it1}(e^{3it1} + ~x2^2)", ok)
        d = nested_link(f)
        inv = link_invariants(d)
        assert record(3, "3 components", inv["components"] == 3 == d.component_count)
        inner_ok = d.pieces[0].piece.name == "g_1" and inv["component_braids"][0] == ["e"]
        assert record(3, "inner piece is an unknot", inner_ok, str(inv["component_braids"][0]))
        outer = inv["component_braids"][1]
        letters = [w for w in outer if w != "e"]
        count = sum(abs(int(w.split("^")[1])) if "^" in w else 1 for w in letters)
        ok = sorted(outer, key=lambda w: w == "e") == outer and len(outer) == 2 and outer[1] == "e" and count == 3
        assert record(3, "outer piece: core plus closure of a 2-strand braid with 3 letters", ok, str(outer))
        lab = inv["labels"]
        L = np.array(inv["linking_matrix"])
        lk = int(L[lab.index("h_2:0"), lab.index("h_2:1")])
        assert record(3, "|lk(trefoil, core)| = 3 with Gauss residual < 0.1",
                      abs(lk) == 3 and inv["residual"] < 0.1, f"lk = {lk}, residual {inv['residual']:.1e}")


# ---------------------------------------------------------------- 4

def test_criterion_4_face_and_full_agree():
    with Clock(4, 60):
        f, face = P(TREFOIL, 2), P(TREFOIL_FACE, 2)
        d_full = nested_link(f)
        d_face = nested_link(face, diagram=gamma_inn(f).diagram)
        a, b = link_invariants(d_full), link_invariants(d_face)
        same = (a["braids"] == b["braids"] and a["components"] == b["components"]
                and a["linking_matrix"] == b["linking_matrix"] and a["component_braids"] == b["component_braids"])
        assert record(4, "descriptors of f and its (2,3)-face agree (braids, components, linking matrix)", same)
        rep = check_semi(f, (2, 3))
        found = ((2, 3), (11,), True) in {(wt.w, wt.d, wt.radial) for wt in detect_weight_type(face)}
        ok = found and semi_passes(rep) and rep.flavor == "SRWH" and rep.notes["degrees"] == ["11"]
        assert record(4, "SRWH detection returns ((2,3);11)", ok, f"{rep.flavor} {grade(rep)}")


# ---------------------------------------------------------------- 5

def test_criterion_5_not_nice():
    with Clock(5, 30):
        f = P(NOT_NICE, 2)
        rep = check_map(f, "IKND")
        assert record(5, "IKND passes on Gamma(f)", rep.overall != "fail", f"{grade(rep)}; {numeric_evidence(rep)}")
        nice = check_nice(f)
        bad = nice.failures()
        ok = (not nice.nice and [tuple(int(x) for x in v.vertex) for v in bad] == [(1, 1)]
              and all(abs(math.cos(2 * t) + 0.25) < 1e-8 for t, _, _ in bad[0].witnesses))
        assert record(5, "not Gamma-nice at (1,1), unit-root parameters with |cos 2t + 1/4| < 1e-8", ok)
        M = f.filter(lambda k: tuple(a + b for a, b in zip(*k)) == (1, 1))
        v = vertex_knd_2var(M)
        roots = unit_roots(M)
        ok = (v.status == CERTIFIED and len(roots) == 4 and all(0 <= t < 2 * math.pi for t, _, _ in roots))
        assert record(5, "vertex_knd_2var certifies the vertex with exactly 4 unit roots in [0, 2 pi)", ok,
                      f"{v.method}, {len(roots)} roots")


# ---------------------------------------------------------------- 6

def test_criterion_6_not_nice_22():
    with Clock(6, 10):
        f = P(NOT_NICE_22, 2)
        rep = check_nice(f)
        assert record(6, "niceness fails at (2,2)",
                      not rep.nice and [tuple(int(x) for x in v.vertex) for v in rep.failures()] == [(2, 2)])
        M = f.filter(lambda k: tuple(a + b for a, b in zip(*k)) == (2, 2))
        vals = [abs(M.evaluate_batch(np.array([r * (1 + 1j), r]))) for r in (0.5, 1.0, 2.0)]
        assert record(6, "|f_Delta(r(1+i), r)| < 1e-10 for r in {0.5, 1, 2}", max(vals) < 1e-10,
                      f"max {max(vals):.1e}")


# ---------------------------------------------------------------- 7

def test_criterion_7_innd_iknd_agree():
    with Clock(7, 180):
        bad, definite = [], 0
        for k, f in enumerate(corpus()):
            a = check_innd_2var(f).overall
            try:
                b = gamma_inn(f).report.overall
            except GammaInnError:
                B = newton_boundary_of(f)
                b = check_map(f, "IKND", [B.to_diagram()]).overall if B.convenient else "inconclusive"
            if {a, b} == {"pass", "fail"}:
                bad.append(k)
            definite += a != "inconclusive" and b != "inconclusive"
        assert record(7, f"no contradictory definite verdicts on {CORPUS_SIZE} polynomials", not bad,
                      f"{definite} definite pairs, contradictions at {bad}")


# ---------------------------------------------------------------- 8

def test_criterion_8_property_suites():
    with Clock(8, 180):
        polys = corpus()
        tested, bad = 0, []
        for k, f in enumerate(polys):
            B = newton_boundary_of(f)
            if not B.convenient or check_map(f, "KND").overall == "fail":
                continue
            tested += 1
            if check_map(f, "IKND", [B.to_diagram()]).overall == "fail":
                bad.append(k)
        assert record(8, "convenient+KND => IKND (no Degenerate)", tested > 0 and not bad,
                      f"{tested} convenient KND cases, Degenerate at {bad}")
        for flavor in ("IKND", "SIKND"):
            tested, bad, grades = 0, [], set()
            for k, f in enumerate(polys):
                try:
                    D = gamma_inn(f).diagram
                except GammaInnError:
                    continue
                if check_map(f, flavor, [D]).overall != "pass":
                    continue
                tested += 1
                dd = doubled(D)
                r = check_map(realify(f), flavor, [dd, dd])
                grades.add(grade(r))
                if r.overall == "fail":
                    bad.append(k)
            assert record(8, f"mixed {flavor} pass => realified {flavor} pass with doubled diagrams",
                          tested > 0 and not bad, f"{tested} cases, grades {sorted(grades)}, Degenerate at {bad}")
        rm = sphere_map()
        rep = check_map(rm, "IKND", [diagram_from_functionals([(1, 1, 1, 1)]),
                                     diagram_from_functionals([(F(1, 3),) * 4])])
        record(8, "sphere map (2x1, 2x2|x|^2) itself passes IKND", rep.overall != "fail", grade(rep))
        D = diagram_from_functionals([(1, 1)])
        pairs = list(permutation_pairs(2, 1))
        witnessed = 0
        for sigma, vs in pairs:
            r = check_map(reconstruct_mixed(rm, sigma, vs), "IKND", [D])
            witnessed += r.overall == "fail" and any(o.verdict.witness is not None for o in r.failures())
        assert record(8, "all 48 mixed reconstructions are not IKND, each with a witness",
                      len(pairs) == 48 == witnessed, f"{witnessed}/{len(pairs)}")
        assert rep.overall != "fail"


# ---------------------------------------------------------------- 9

def test_criterion_9_make_convenient():
    with Clock(9, 60):
        steps = make_convenient(P(TREFOIL_FACE, 2))
        last = steps[-1].polynomial
        assert record(9, "terminates in <= 4 steps", len(steps) - 1 <= 4, f"{len(steps) - 1} steps")
        knd = check_map(last, "KND")
        assert record(9, "final polynomial convenient and KND",
                      newton_boundary_of(last).convenient and knd.overall != "fail", grade(knd))
        ok = True
        for prev, step in zip(steps, steps[1:]):
            theta = step.polynomial - prev.polynomial
            fam = DeformationFamily.parse([prev.polynomial.to_text()], [f"eps*({theta.to_text()})"], 2)
            D = gamma_inn(prev.polynomial).diagram
            ok &= theta_degree_ok(fam, [D], strict=True)[0] and step.certificate["theorem"] == "inner-diagram"
        assert record(9, "every step certified by theta_degree_ok (strict) under the inner-diagram theorem", ok)
        a = link_invariants(nested_link(last))
        b = link_invariants(nested_link(P(TREFOIL, 2)))
        same = all(a[k] == b[k] for k in ("components", "braids", "component_braids", "linking_matrix"))
        assert record(9, "final link descriptor equals criterion 3's", same)


# ---------------------------------------------------------------- 10

JOBS = [
    ("sknd", {"map": SIKND_ONLY, "n": 3, "kind": "real"}),
    ("siknd", {"map": SIKND_ONLY, "n": 3, "kind": "real", "diagrams": [[["1/12", "1/6", "1/4"]]]}),
    ("dv", {"map": PRODUCT, "n": 3, "kind": "real", "v": ["0", "9", "10"]}),
    ("gamma-inn", {"map": TREFOIL, "n": 2}),
    ("link", {"map": TREFOIL, "n": 2}),
    ("semi", {"map": TREFOIL, "n": 2, "weight": [2, 3]}),
    ("iknd", {"map": NOT_NICE, "n": 2}),
    ("nice", {"map": NOT_NICE_22, "n": 2}),
    ("make-convenient", {"map": TREFOIL_FACE, "n": 2}),
]


def test_criterion_10_determinism():
    diffs = []
    for analysis, data in JOBS:
        outs = []
        for _ in range(2):
            nondegen._cached_check.cache_clear()
            outs.append(render(run(JobConfig.from_json(dict(data, seed=3), analysis))[0]))
        if outs[0] != outs[1]:
            diffs.append(analysis)
    assert record(10, "rerun with the same seed gives byte-identical structured reports", not diffs,
                  f"{len(JOBS)} jobs, differing: {diffs}")
