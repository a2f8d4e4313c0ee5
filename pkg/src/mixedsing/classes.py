"""Structural classes (WH, RWH and their semi- versions) and the inner diagram of a plane mixed polynomial."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .newton_geom import CFaceDiagram, GeometryError, diagram_from_functionals, face_function, newton_boundary_of, support_above
from .nondegen import (DEFAULT_CONFIG, STRONG, WEAK, CheckConfig, Obligation, PreconditionError, Report, _as_map,
                       _run, _subsets, check_map)
from .poly_core import MIXED, MixedPolynomial, PolynomialMap, initial_form, min_degree, support

WEIGHT_BOUND = 32
ENUMERATION_CAP = 200_000


@dataclass(frozen=True)
class WeightType:
    w: tuple[int, ...]
    d: tuple[Fraction, ...]
    radial: bool


def _rref(rows: list[list[Fraction]], n: int) -> tuple[list[list[Fraction]], list[int]]:
    A = [r[:] for r in rows]
    pivots, r = [], 0
    for c in range(n):
        k = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                fac = A[i][c]
                A[i] = [x - fac * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _homogeneous_weights(supports: list[list[tuple]], n: int, bound: int) -> list[tuple[int, ...]]:
    rows = []
    for pts in supports:
        pts = sorted(pts)
        rows += [[Fraction(a - b) for a, b in zip(p, pts[0])] for p in pts[1:]]
    R, pivots = _rref(rows, n) if rows else ([], [])
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return []
    b = bound
    while b ** len(free) > ENUMERATION_CAP:
        b -= 1
    out = []
    for vals in product(range(1, b + 1), repeat=len(free)):
        w = [Fraction(0)] * n
        for c, v in zip(free, vals):
            w[c] = Fraction(v)
        ok = True
        for row, pc in zip(R, pivots):
            x = -sum((row[c] * w[c] for c in free), Fraction(0))
            if x.denominator != 1 or not 1 <= x <= bound:
                ok = False
                break
            w[pc] = x
        if ok:
            iw = tuple(int(x) for x in w)
            if math.gcd(*iw) == 1:
                out.append(iw)
    return sorted(set(out))


def detect_weight_type(fmap, bound: int = WEIGHT_BOUND) -> list[WeightType]:
    """Every primitive integer weight (entries <= bound) under which each component is homogeneous.

    When the solution space has too many free coordinates for an exhaustive
    scan, the free entries are scanned up to a smaller bound so that at most
    ENUMERATION_CAP candidates are tried.
    """
    fmap = _as_map(fmap)
    if any(f.is_zero() for f in fmap):
        raise PreconditionError("components must be nonzero")
    supports = [sorted(support(f)) for f in fmap]
    radial = fmap.kind == MIXED and not all(f.is_holomorphic for f in fmap)
    out = []
    for w in _homogeneous_weights(supports, fmap.n, bound):
        d = tuple(min_degree(f, w) for f in fmap)
        out.append(WeightType(w, d, radial))
    return out


def check_semi(fmap, w: Sequence[int], config: CheckConfig | None = None) -> Report:
    """Semi-(radially) weighted homogeneity for the weight w.

    Obligations are the weak checks of the lowest part on every coordinate
    stratum; the strong statement Sigma(f_w) = {0} is recorded in the notes.
    """
    fmap = _as_map(fmap)
    cfg = config or DEFAULT_CONFIG
    w = tuple(int(x) for x in w)
    if len(w) != fmap.n or any(x <= 0 for x in w):
        raise PreconditionError("weight must be strictly positive")
    if any(f.is_zero() for f in fmap):
        raise PreconditionError("components must be nonzero")
    low = PolynomialMap(tuple(initial_form(f, w) for f in fmap))
    d = [min_degree(f, w) for f in fmap]
    gap = [min_degree(f - g, w) for f, g in zip(fmap, low)]
    gap_ok = all(g > dj for g, dj in zip(gap, d))
    strata = list(_subsets(fmap.n))
    weak = _run([(low, I, WEAK, w) for I in strata], cfg)
    strong = _run([(low, I, STRONG, w) for I in strata], cfg)
    obs = [Obligation(f"lowest part w={list(w)}", None, I, WEAK, v) for I, v in zip(strata, weak)]
    strong_status = ("fail" if any(v.degenerate for v in strong)
                     else "pass" if all(v.status == "CertifiedNondegenerate" for v in strong) else "inconclusive")
    radial = fmap.kind == MIXED and not all(f.is_holomorphic for f in fmap)
    rep = Report("SRWH" if radial else "SWH", obs, [f"w={list(w)}"], cfg,
                 notes={"degrees": [str(x) for x in d], "gap_ok": gap_ok,
                        "higher_degrees": [str(x) if x != math.inf else "inf" for x in gap],
                        "sigma_zero": strong_status,
                        "sigma_zero_strata": [[list(I), v.status] for I, v in zip(strata, strong)]})
    if not gap_ok:
        rep.notes["failure"] = "degree gap"
    return rep


def semi_passes(rep: Report) -> bool:
    return rep.overall != "fail" and rep.notes.get("gap_ok", False)


# ---------------------------------------------------------------- inner diagram

class GammaInnError(PreconditionError):
    pass


@dataclass
class GammaInnResult:
    diagram: CFaceDiagram
    principal: list[tuple[int, ...]]
    maximal: bool
    alternatives: list[CFaceDiagram] = field(default_factory=list)
    report: Report | None = None
    candidates: int = 0


def _candidate_lines(f: MixedPolynomial) -> list[tuple[Fraction, ...]]:
    B = newton_boundary_of(f)
    lines = []
    for face in B.compact_facets:
        lines.append(tuple(Fraction(x) / face.level for x in face.generator))
    lvl = min(sum(p) for p in support(f))
    one = (Fraction(1, lvl), Fraction(1, lvl))
    if one not in lines:
        lines.append(one)
    return sorted(lines)


def axis_weight_ok(f: MixedPolynomial, D: CFaceDiagram) -> bool:
    """For axes whose diagram point carries no term, faces touching them need w_i <= w_j."""
    pts = support(f)
    for i in range(D.n):
        axis_pts = [v for v in D.vertices if all(v[k] == 0 for k in range(D.n) if k != i)]
        if any(v in pts for v in axis_pts):
            continue
        for face in D.inner_faces():
            if face.meets({i + 1}) and face.generator[i] > min(face.generator):
                return False
    return True


def _region_inside(D: CFaceDiagram, E: CFaceDiagram) -> bool:
    """D + R^n_{>=0} is contained in E + R^n_{>=0}."""
    return all(E.contains(v) for v in D.vertices)


def admissible(f: MixedPolynomial, D: CFaceDiagram, config: CheckConfig | None = None) -> tuple[bool, Report | None, str]:
    if not support_above(support(f), D):
        return False, None, "support below diagram"
    for face in D.inner_faces():
        if face_function(f, D, face.generator).is_zero():
            return False, None, "empty inner face"
    if not axis_weight_ok(f, D):
        return False, None, "axis weight condition"
    rep = check_map(f, "IKND", [D], config)
    if rep.overall == "fail":
        return False, rep, "IKND fails"
    return True, rep, "ok"


def gamma_inn(f: MixedPolynomial, config: CheckConfig | None = None) -> GammaInnResult:
    """Region-maximal admissible diagram among lines through the Newton boundary."""
    if f.n != 2:
        raise PreconditionError("the inner diagram is defined for two variables")
    if f.is_zero():
        raise PreconditionError("zero polynomial")
    f = f.as_mixed()
    lines = _candidate_lines(f)
    seen, good = set(), []
    count = 0
    for k in range(1, len(lines) + 1):
        for J in combinations(lines, k):
            try:
                D = diagram_from_functionals(J)
            except GeometryError:
                continue
            if D.redundant or D.vertices in seen:
                continue
            seen.add(D.vertices)
            count += 1
            ok, rep, _ = admissible(f, D, config)
            if ok:
                good.append((D, rep))
    if not good:
        raise GammaInnError("no admissible diagram: f is not IKND for any candidate")
    maxima = [(D, rep) for D, rep in good
              if not any(E.vertices != D.vertices and _region_inside(D, E) for E, _ in good)]
    maxima.sort(key=lambda p: p[0].vertices)
    D, rep = maxima[0]
    return GammaInnResult(D, D.principal_weights(), len(maxima) == 1, [E for E, _ in maxima[1:]], rep, count)
