"""One-parameter deformations F(x, eps) = f(x) + theta(x, eps) and the hypothesis checks around them.

Each criterion below is reported as a TheoremReport: a list of hypotheses with
pass/fail/inconclusive status and, when none of them fails, the conclusions
they license.  A conclusion backed by an inconclusive hypothesis is marked
"conditional".  Nothing here proves topology; the reports certify hypotheses.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .newton_geom import (CFaceDiagram, GeometryError, axis_condition, build_Dv,
                          newton_boundary_of, support_above)
from .nondegen import DEFAULT_CONFIG, CheckConfig, PreconditionError, check_map
from .poly_core import MIXED, REAL, ExactComplex, MixedPolynomial, PolynomialMap, as_fraction, parse_mixed, support
from .search import BallProblem, levenberg_marquardt, task_seed

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
NO_COALESCING = "NoCoalescing"
WEAK_NO_COALESCING = "WeakNoCoalescing"
LINK_CONSTANT = "LinkConstant"
TOPOLOGICALLY_TRIVIAL = "TopologicallyTrivial"

DEFAULT_EPSILONS = (0.0, 1e-3, 1e-2, 1e-1, 1.0)
DEFAULT_RADII = tuple(np.logspace(-3, 0, 7))
PROBE_SEEDS = 128

# descriptive ids for the criteria; the anchor is a one-line statement of what is certified
THEOREMS = {
    "no-coalescing": "inner Khovanskii non-degeneracy plus degree bounds above the diagrams rule out coalescing of critical points",
    "inner-link-constancy": "KND of f_D, inner non-degeneracy, degree bounds and the axis condition give a link-constant family",
    "convenient-knd": "a convenient KND map deformed above its Newton boundaries is link-constant",
    "semi-weighted": "a semi-(radially) weighted homogeneous map deformed above its weighted degree is link-constant",
    "inner-diagram": "a plane IKND mixed polynomial deformed above its inner diagram is link-constant",
    "low-codimension": "no coalescing in low codimension gives topological triviality",
    "uniform-radius": "no coalescing with a uniform Milnor radius gives topological triviality",
}


# ---------------------------------------------------------------- the family

@dataclass(frozen=True)
class DeformationFamily:
    """theta[j] maps an eps-power k >= 1 to the x-polynomial multiplying eps^k."""

    base: PolynomialMap
    theta: tuple[dict, ...]
    epsilon_kind: str = REAL

    def __post_init__(self):
        if len(self.theta) != self.base.p:
            raise PreconditionError("theta needs one entry per component")
        if self.epsilon_kind not in (REAL, "complex"):
            raise PreconditionError("epsilon_kind is 'real' or 'complex'")
        for comp in self.theta:
            for k, g in comp.items():
                if int(k) < 1:
                    raise PreconditionError("theta must vanish at eps = 0")
                if g.n != self.base.n:
                    raise PreconditionError("theta lives in the base variables")
                if g.has_constant:
                    raise PreconditionError("theta must vanish at x = 0")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> int:
        return self.base.p

    @classmethod
    def parse(cls, base: Sequence[str], theta: Sequence[str], n: int, kind: str = MIXED,
              epsilon_kind: str = REAL) -> "DeformationFamily":
        """theta components are written with the token ``eps`` for the parameter."""
        f = PolynomialMap(tuple(parse_mixed(t, n, kind) for t in base))
        comps = []
        for text in theta:
            if "~eps" in text.replace(" ", ""):
                raise PreconditionError("theta is polynomial in eps, not in its conjugate")
            g = parse_mixed(re.sub(r"\beps\b", f"x{n + 1}", text), n + 1, kind) if text.strip() else None
            comps.append(split_eps(g, n) if g is not None else {})
        return cls(f, tuple(comps), epsilon_kind)

    def theta_support(self, j: int) -> frozenset:
        pts = set()
        for g in self.theta[j].values():
            pts |= support(g)
        return frozenset(pts)

    def theta_poly(self, j: int) -> MixedPolynomial:
        """All x-terms of theta_j with eps set to 1 (only the support matters for degree checks)."""
        out = MixedPolynomial.zero(self.n, self.base.kind)
        for g in self.theta[j].values():
            out = out + g
        return out

    def at(self, eps) -> PolynomialMap:
        """The member F_eps with exact coefficients (floats are taken at their binary value)."""
        e = ExactComplex(as_fraction(complex(eps).real), as_fraction(complex(eps).imag)) if isinstance(eps, complex) \
            else ExactComplex(as_fraction(eps))
        comps = []
        for f, th in zip(self.base, self.theta):
            F = f
            for k, g in th.items():
                F = F + g * MixedPolynomial.constant(self.n, e ** int(k), g.kind if e.is_real else MIXED)
            comps.append(F)
        return PolynomialMap(tuple(comps))

    def as_json(self) -> dict:
        return {"base": [f.to_text() for f in self.base], "kind": self.base.kind,
                "theta": [{str(k): g.to_text() for k, g in sorted(th.items())} for th in self.theta],
                "epsilon_kind": self.epsilon_kind}


def split_eps(g: MixedPolynomial, n: int) -> dict:
    """Split a polynomial in (x_1..x_n, eps = x_{n+1}) by eps-power."""
    out: dict[int, dict] = {}
    for (nu, mu), c in g.items():
        if mu[n]:
            raise PreconditionError("theta is polynomial in eps, not in its conjugate")
        out.setdefault(nu[n], {})[(nu[:n], mu[:n])] = c
    if 0 in out:
        raise PreconditionError("theta must vanish at eps = 0")
    return {k: MixedPolynomial(n, terms, g.kind) for k, terms in sorted(out.items())}


# ---------------------------------------------------------------- degree bounds

@dataclass(frozen=True)
class Margin:
    component: int
    weight: tuple[Fraction, ...]       # normalized so the diagram sits at level 1
    theta_level: Fraction | None       # None when theta_j is empty
    margin: Fraction | None

    def as_json(self) -> dict:
        return {"component": self.component, "weight": [str(x) for x in self.weight],
                "theta_level": None if self.theta_level is None else str(self.theta_level),
                "margin": None if self.margin is None else str(self.margin)}


def theta_degree_ok(family: DeformationFamily, diagrams: Sequence[CFaceDiagram], strict: bool = False
                    ) -> tuple[bool, list[Margin]]:
    """Every x-term of theta_j lies on or above D_j (strictly above when ``strict``).

    Margins are min over supp(theta_j) of l(nu) - 1 for each functional l of D_j.
    """
    if len(diagrams) != family.p:
        raise PreconditionError("need one diagram per component")
    ok = True
    margins = []
    for j, D in enumerate(diagrams):
        pts = family.theta_support(j)
        for l in D.functionals:
            if not pts:
                margins.append(Margin(j, l.w, None, None))
                continue
            lvl = min(sum((a * b for a, b in zip(l.w, nu)), Fraction(0)) for nu in pts)
            m = lvl - 1
            margins.append(Margin(j, l.w, lvl, m))
            if m < 0 or (strict and m == 0):
                ok = False
    return ok, margins


def weight_degree_ok(family: DeformationFamily, w: Sequence[int], d: Sequence, strict: bool
                     ) -> tuple[bool, list[Margin]]:
    """d(w; theta_j) >= d_j (or >) for one integer weight."""
    ok, out = True, []
    for j in range(family.p):
        pts = family.theta_support(j)
        wf = tuple(Fraction(x) / Fraction(d[j]) for x in w)
        if not pts:
            out.append(Margin(j, wf, None, None))
            continue
        lvl = min(sum((a * b for a, b in zip(wf, nu)), Fraction(0)) for nu in pts)
        out.append(Margin(j, wf, lvl, lvl - 1))
        if lvl < 1 or (strict and lvl == 1):
            ok = False
    return ok, out


# ---------------------------------------------------------------- reports

@dataclass
class Hypothesis:
    name: str
    status: str
    evidence: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {"name": self.name, "status": self.status, "evidence": self.evidence}


@dataclass
class Conclusion:
    kind: str
    scope: str                 # "global" or "neighborhood"
    status: str                # "certified" or "conditional"
    statement: str
    anchor: str
    requires: list[str] = field(default_factory=list)

    def as_json(self) -> dict:
        return {"kind": self.kind, "scope": self.scope, "status": self.status, "statement": self.statement,
                "anchor": self.anchor, "requires": self.requires}


@dataclass
class TheoremReport:
    theorem: str
    hypotheses: list[Hypothesis]
    conclusions: list[Conclusion]
    notes: dict = field(default_factory=dict)

    @property
    def anchor(self) -> str:
        return THEOREMS[self.theorem]

    def status(self, name: str) -> str:
        return next(h.status for h in self.hypotheses if h.name == name)

    def conclusion(self, kind: str) -> Conclusion | None:
        return next((c for c in self.conclusions if c.kind == kind), None)

    def as_json(self) -> dict:
        return {"theorem": self.theorem, "anchor": self.anchor,
                "hypotheses": [h.as_json() for h in self.hypotheses],
                "conclusions": [c.as_json() for c in self.conclusions], "notes": self.notes}


def _combine(statuses: Sequence[str]) -> str | None:
    """None when some hypothesis fails, else certified/conditional."""
    if FAIL in statuses:
        return None
    return "certified" if all(s == PASS for s in statuses) else "conditional"


def _conclude(rep: TheoremReport, kind: str, names: Sequence[str], scope: str) -> None:
    by = {h.name: h.status for h in rep.hypotheses}
    st = _combine([by[n] for n in names])
    if st is None:
        return
    text = f"hypotheses of {rep.theorem} verified => {kind} by {rep.theorem}"
    if st == "conditional":
        text = f"hypotheses of {rep.theorem} not all certified => {kind} by {rep.theorem} conditional on them"
    rep.conclusions.append(Conclusion(kind, scope, st, text, THEOREMS[rep.theorem], list(names)))


def _report_status(rep) -> str:
    return {"pass": PASS, "fail": FAIL}.get(rep.overall, INCONCLUSIVE)


def _check_hyp(name: str, fmap, flavor: str, diagrams, cfg) -> Hypothesis:
    try:
        rep = check_map(fmap, flavor, diagrams, cfg)
    except (PreconditionError, GeometryError) as exc:
        return Hypothesis(name, FAIL, {"error": str(exc)})
    ev = {"overall": rep.overall, "obligations": len(rep.obligations)}
    bad = rep.failures()
    if bad:
        ev["failure"] = bad[0].as_json()
    return Hypothesis(name, _report_status(rep), ev)


def _degree_hyp(family, diagrams, name="theta above diagrams") -> tuple[Hypothesis, bool]:
    ok, margins = theta_degree_ok(family, diagrams, strict=False)
    strict, _ = theta_degree_ok(family, diagrams, strict=True)
    return Hypothesis(name, PASS if ok else FAIL,
                      {"strict": strict, "margins": [m.as_json() for m in margins]}), strict


def diagram_part(f: MixedPolynomial, D: CFaceDiagram) -> MixedPolynomial:
    """Terms of f whose support point lies on the diagram D."""
    return f.filter(lambda k: D.ell(tuple(a + b for a, b in zip(*k))) == 1)


def default_diagrams(fmap: PolynomialMap, config: CheckConfig | None = None) -> tuple[list[CFaceDiagram] | None, str]:
    """A natural diagram per component: Newton boundaries when convenient, else the plane inner
    diagram or the filled three-variable diagram."""
    bounds = [newton_boundary_of(f) for f in fmap]
    if all(B.convenient for B in bounds):
        return [B.to_diagram() for B in bounds], "newton boundary"
    if fmap.p == 1 and fmap.n == 2 and fmap.kind == MIXED:
        from .classes import gamma_inn
        try:
            return [gamma_inn(fmap[0], config).diagram], "inner diagram"
        except PreconditionError as exc:
            return None, str(exc)
    if fmap.p == 1 and fmap.n == 3:
        try:
            return [build_Dv(fmap[0]).diagram], "filled diagram"
        except GeometryError as exc:
            return None, str(exc)
    return None, "no diagram construction applies"


def _no_coalescing(family, diagrams, cfg) -> TheoremReport:
    f = family.base
    ikd = _check_hyp("f IKND w.r.t. D", f, "IKND", diagrams, cfg)
    sikd = _check_hyp("f SIKND w.r.t. D", f, "SIKND", diagrams, cfg)
    deg, strict = _degree_hyp(family, diagrams)
    rep = TheoremReport("no-coalescing", [ikd, sikd, deg], [])
    scope = "global" if strict else "neighborhood"
    _conclude(rep, WEAK_NO_COALESCING, [ikd.name, deg.name], scope)
    _conclude(rep, NO_COALESCING, [sikd.name, deg.name], scope)
    return rep


def _inner_link(family, diagrams, cfg) -> TheoremReport:
    f = family.base
    fD = PolynomialMap(tuple(diagram_part(g, D) for g, D in zip(f, diagrams)))
    if fD.is_zero() or any(g.is_zero() for g in fD):
        knd = Hypothesis("f_D KND", FAIL, {"error": "some component has no terms on its diagram"})
    else:
        knd = _check_hyp("f_D KND", fD, "KND", None, cfg)
        knd.evidence["f_D"] = [g.to_text() for g in fD]
    ikd = _check_hyp("f IKND w.r.t. D", f, "IKND", diagrams, cfg)
    deg, strict = _degree_hyp(family, diagrams)
    try:
        viol = axis_condition(list(f), diagrams)
        axis = Hypothesis("axis condition", PASS if not viol else FAIL,
                          {"violations": [{"face": v.face.as_json(), "I": sorted(v.I)} for v in viol]})
    except GeometryError as exc:
        axis = Hypothesis("axis condition", FAIL, {"error": str(exc)})
    sikd = _check_hyp("f SIKND w.r.t. D", f, "SIKND", diagrams, cfg)
    rep = TheoremReport("inner-link-constancy", [knd, ikd, deg, axis, sikd], [])
    base = [knd.name, ikd.name, deg.name, axis.name]
    _conclude(rep, LINK_CONSTANT, base, "global" if strict else "neighborhood")
    if rep.conclusions:
        _conclude(rep, TOPOLOGICALLY_TRIVIAL, base + [sikd.name], "neighborhood")
    return rep


def _convenient(family, cfg) -> TheoremReport:
    f = family.base
    bounds = [newton_boundary_of(g) for g in f]
    conv = Hypothesis("components convenient", PASS if all(B.convenient for B in bounds) else FAIL,
                      {"convenient": [B.convenient for B in bounds]})
    rep = TheoremReport("convenient-knd", [conv], [])
    if conv.status == FAIL:
        return rep
    Ds = [B.to_diagram() for B in bounds]
    knd = _check_hyp("f KND", f, "KND", None, cfg)
    deg, strict = _degree_hyp(family, Ds, "theta above Newton boundaries")
    sikd = _check_hyp("f SIKND w.r.t. Newton boundaries", f, "SIKND", Ds, cfg)
    rep.hypotheses += [knd, deg, sikd]
    base = [conv.name, knd.name, deg.name]
    _conclude(rep, LINK_CONSTANT, base, "global" if strict else "neighborhood")
    if rep.conclusions:
        _conclude(rep, TOPOLOGICALLY_TRIVIAL, base + [sikd.name], "neighborhood")
    return rep


def candidate_weights(fmap: PolynomialMap) -> list[tuple[int, ...]]:
    """Weights worth testing for semi-weighted homogeneity: homogeneity weights and Newton facet normals."""
    from .classes import detect_weight_type
    out = []
    try:
        out += [wt.w for wt in detect_weight_type(fmap)]
    except PreconditionError:
        pass
    for g in fmap:
        for face in newton_boundary_of(g).compact_facets:
            w = tuple(int(x) for x in face.generator)
            if all(x > 0 for x in w):
                out.append(w)
    seen, uniq = set(), []
    for w in out:
        if w not in seen:
            seen.add(w)
            uniq.append(w)
    return uniq


def _semi_weighted(family, cfg, weight=None) -> TheoremReport:
    from .classes import check_semi, semi_passes
    f = family.base
    weights = [tuple(int(x) for x in weight)] if weight is not None else candidate_weights(f)
    tried = []
    chosen = None
    for w in weights:
        try:
            rep = check_semi(f, w, cfg)
        except PreconditionError as exc:
            tried.append({"w": list(w), "error": str(exc)})
            continue
        tried.append({"w": list(w), "overall": rep.overall, "gap_ok": rep.notes["gap_ok"]})
        if semi_passes(rep):
            chosen = (w, rep)
            break
    if chosen is None:
        return TheoremReport("semi-weighted", [Hypothesis("f semi-weighted homogeneous", FAIL, {"tried": tried})], [])
    w, srep = chosen
    d = [Fraction(x) for x in srep.notes["degrees"]]
    semi = Hypothesis(f"f {srep.flavor} of weight-type {list(w)}", _report_status(srep),
                      {"w": list(w), "d": [str(x) for x in d], "tried": tried})
    ok, margins = weight_degree_ok(family, w, d, strict=False)
    strict, _ = weight_degree_ok(family, w, d, strict=True)
    deg = Hypothesis("theta above weighted degree", PASS if ok else FAIL,
                     {"strict": strict, "margins": [m.as_json() for m in margins]})
    sig = srep.notes["sigma_zero"]
    sigma = Hypothesis("Sigma(f_w) = {0}", sig if sig in (PASS, FAIL) else INCONCLUSIVE,
                       {"strata": srep.notes["sigma_zero_strata"]})
    rep = TheoremReport("semi-weighted", [semi, deg, sigma], [], {"weight": list(w), "degrees": [str(x) for x in d]})
    _conclude(rep, LINK_CONSTANT, [semi.name, deg.name], "global" if strict else "neighborhood")
    if rep.conclusions:
        _conclude(rep, TOPOLOGICALLY_TRIVIAL, [semi.name, deg.name, sigma.name], "neighborhood")
    return rep


def _inner_diagram(family, cfg) -> TheoremReport | None:
    from .classes import gamma_inn
    f = family.base
    if not (f.p == 1 and f.n == 2 and f.kind == MIXED):
        return None
    try:
        gi = gamma_inn(f[0], cfg)
    except PreconditionError as exc:
        return TheoremReport("inner-diagram", [Hypothesis("f IKND", FAIL, {"error": str(exc)})], [])
    D = gi.diagram
    ikd = Hypothesis("f IKND", _report_status(gi.report),
                     {"diagram": repr(D), "principal": [list(map(str, w)) for w in gi.principal],
                      "maximal": gi.maximal})
    deg, strict = _degree_hyp(family, [D], "theta above inner diagram")
    sknd = _check_hyp("f SKND", f, "SKND", None, cfg)
    rep = TheoremReport("inner-diagram", [ikd, deg, sknd], [],
                        {"inner_diagram": repr(D), "link": "link of F_eps isotopic to link of f"})
    _conclude(rep, LINK_CONSTANT, [ikd.name, deg.name], "global" if strict else "neighborhood")
    if rep.conclusions:
        _conclude(rep, TOPOLOGICALLY_TRIVIAL, [ikd.name, deg.name, sknd.name], "neighborhood")
    return rep


def _trivial_routes(family, diagrams, cfg, probe=None) -> list[TheoremReport]:
    f = family.base
    sikd = _check_hyp("f SIKND w.r.t. D", f, "SIKND", diagrams, cfg)
    deg, _ = _degree_hyp(family, diagrams)
    codim = f.n - f.p
    bound = 1 if f.kind == MIXED else 2
    dim = Hypothesis("n - p within the fibration range", PASS if codim <= bound else FAIL,
                     {"n_minus_p": codim, "bound": bound})
    low = TheoremReport("low-codimension", [sikd, deg, dim], [])
    _conclude(low, TOPOLOGICALLY_TRIVIAL, [sikd.name, deg.name, dim.name], "neighborhood")
    # a probe can refute a uniform radius but never establish one
    if probe is None:
        radius = Hypothesis("uniform Milnor radius", INCONCLUSIVE, {"probe": "not run"})
    else:
        radius = Hypothesis("uniform Milnor radius", FAIL if probe["near_tangency"] else INCONCLUSIVE,
                            {"min_angle": probe["min_angle"], "near_tangency": probe["near_tangency"]})
    uni = TheoremReport("uniform-radius", [sikd, deg, radius], [])
    _conclude(uni, TOPOLOGICALLY_TRIVIAL, [sikd.name, deg.name, radius.name], "neighborhood")
    return [low, uni]


def classify_deformation(family: DeformationFamily, config: CheckConfig | None = None,
                         diagrams: Sequence[CFaceDiagram] | None = None, weight: Sequence[int] | None = None,
                         probe: dict | None = None) -> list[TheoremReport]:
    """Evaluate every criterion that can be stated for the family.

    ``diagrams`` default to :func:`default_diagrams`; ``weight`` pins the
    semi-weighted route to one weight; ``probe`` is a milnor_radius_probe
    record feeding the uniform-radius route.
    """
    cfg = config or DEFAULT_CONFIG
    out = []
    if diagrams is None:
        diagrams, source = default_diagrams(family.base, cfg)
    else:
        diagrams, source = list(diagrams), "given"
    if diagrams is not None:
        bad = [j for j, (g, D) in enumerate(zip(family.base, diagrams)) if not support_above(support(g), D)]
        if bad or len(diagrams) != family.p:
            diagrams, source = None, f"components {bad} lie below their diagrams"
    if diagrams is not None:
        out.append(_no_coalescing(family, diagrams, cfg))
        out.append(_inner_link(family, diagrams, cfg))
        out += _trivial_routes(family, diagrams, cfg, probe)
        for rep in out:
            rep.notes["diagrams"] = [repr(D) for D in diagrams]
            rep.notes["diagram_source"] = source
    out.append(_convenient(family, cfg))
    out.append(_semi_weighted(family, cfg, weight))
    inner = _inner_diagram(family, cfg)
    if inner is not None:
        out.append(inner)
    return out


def conclusions(reports: Sequence[TheoremReport]) -> dict[str, list[str]]:
    """Conclusion kind -> criteria supporting it."""
    out: dict[str, list[str]] = {}
    for rep in reports:
        for c in rep.conclusions:
            out.setdefault(c.kind, []).append(rep.theorem)
    return out


# ---------------------------------------------------------------- numeric probes

def _probe_cell(family: DeformationFamily, eps, r: float, mode_weak: bool, cfg: CheckConfig, sphere: bool):
    F = family.at(eps)
    prob = BallProblem(F, r, mode_weak, sphere=sphere)
    rng = np.random.default_rng(task_seed(cfg.seed, "probe", family.as_json(), repr(eps), repr(r), sphere))
    X0 = prob.starts(PROBE_SEEDS, rng)
    parts = [prob.from_points(X0)]
    if not sphere:
        parts.append(prob.initial_multipliers(X0))
    z = np.concatenate(parts, axis=1)
    z = levenberg_marquardt(prob, z, cfg.max_iter)
    z = levenberg_marquardt(prob, z, cfg.max_iter)
    X = prob.to_points(z[:, : prob.nx])
    return F, prob, X


def coalescing_probe(family: DeformationFamily, epsilons: Sequence = DEFAULT_EPSILONS,
                     radii: Sequence[float] = DEFAULT_RADII, config: CheckConfig | None = None,
                     weak: bool = False) -> dict:
    """Look for nonzero critical points of F_eps inside small balls.

    A critical point is found when 0 < |x| < r and its Oka residual and scale-free
    residual are both below tol_cert.  Candidates are such points closer to the
    origin than the smallest radius for some eps != 0; any candidate flags coalescing.
    """
    cfg = config or DEFAULT_CONFIG
    radii = sorted(float(r) for r in radii)
    cells, found = [], []
    for eps in epsilons:
        for r in radii:
            F, prob, X = _probe_cell(family, eps, r, weak, cfg, sphere=False)
            norm = np.linalg.norm(X, axis=1)
            inside = (norm < r) & (norm > 1e-9 * r)
            res = prob.num.residual(X)
            rel = prob.relative(X)
            if weak:
                res = np.maximum(res, np.linalg.norm(prob.num.values(X), axis=1))
            best = float(res[inside].min()) if np.any(inside) else None
            hit = inside & (res <= cfg.tol_cert) & (rel <= cfg.tol_cert)
            cells.append({"eps": _num(eps), "r": r, "min_residual": best, "samples": int(inside.sum()),
                          "critical": int(hit.sum())})
            kept: list[np.ndarray] = []
            for k in np.flatnonzero(hit):
                # many seeds land on the same critical point
                if any(np.linalg.norm(X[k] - y) <= 1e-6 * r for y in kept):
                    continue
                kept.append(X[k])
                found.append({"eps": _num(eps), "r": r, "norm": float(norm[k]), "residual": float(res[k])})
            cells[-1]["critical"] = len(kept)
    rmin = radii[0]
    near = [c for c in found if c["norm"] < rmin and _abs(c["eps"]) > 0]
    closest = {}
    for c in found:
        key = repr(c["eps"])
        closest[key] = min(closest.get(key, math.inf), c["norm"])
    return {"cells": cells, "critical_points": len(found), "closest": {k: v for k, v in sorted(closest.items())},
            "candidates": near, "coalescing": bool(near), "r_min": rmin, "seeds": PROBE_SEEDS,
            "mode": "weak" if weak else "strong",
            "note": "numeric evidence only; a neighbourhood of eps = 0 cannot be certified by sampling"}


def transversality_angle(J: np.ndarray, x: np.ndarray, rank_tol: float = 1e-10) -> float:
    """Angle between x and the normal space of V (row space of the real Jacobian J).

    Zero exactly when V is tangent to the sphere through x, or singular at x.
    """
    u, s, vt = np.linalg.svd(J, full_matrices=False)
    if s.size == 0 or s[-1] <= rank_tol * max(s[0], 1e-300):
        return 0.0
    N = vt[: s.size]
    xn = x / np.linalg.norm(x)
    proj = N.T @ (N @ xn)
    return float(np.arcsin(np.clip(np.linalg.norm(xn - proj), 0.0, 1.0)))


def milnor_radius_probe(family: DeformationFamily, epsilons: Sequence = DEFAULT_EPSILONS,
                        radii: Sequence[float] = DEFAULT_RADII, config: CheckConfig | None = None,
                        threshold: float = 1e-3) -> dict:
    """Sample V(F_eps) on spheres S_r and record the smallest transversality angle per cell."""
    cfg = config or DEFAULT_CONFIG
    cells = []
    overall = math.inf
    for eps in epsilons:
        for r in sorted(float(x) for x in radii):
            F, prob, X = _probe_cell(family, eps, r, True, cfg, sphere=True)
            R = prob.residual_vector(np.concatenate([prob.from_points(X), np.zeros((X.shape[0], 0))], axis=1))
            ok = np.linalg.norm(R, axis=1) <= math.sqrt(cfg.tol_w) * 1e-2
            angles = []
            if np.any(ok):
                J = prob.num.real_jacobian(X[ok])
                for Jk, xk in zip(J, X[ok]):
                    xr = np.column_stack([xk.real, xk.imag]).ravel() if prob.mixed else xk.real
                    angles.append(transversality_angle(Jk, xr))
            a = min(angles) if angles else None
            if a is not None:
                overall = min(overall, a)
            cells.append({"eps": _num(eps), "r": r, "samples": int(ok.sum()), "min_angle": a})
    return {"cells": cells, "min_angle": None if overall == math.inf else overall,
            "near_tangency": overall < threshold, "threshold": threshold, "seeds": PROBE_SEEDS,
            "note": "numeric evidence only; sampling cannot certify a uniform radius"}


def _num(eps):
    return [eps.real, eps.imag] if isinstance(eps, complex) else float(eps)


def _abs(e):
    return math.hypot(*e) if isinstance(e, list) else abs(e)
