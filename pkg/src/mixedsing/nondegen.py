"""Non-degeneracy checks with three-valued verdicts.

Witnesses are proofs of degeneracy.  Certificates come only from exact routes
(structural emptiness, monomial derivatives, the polar vertex criterion).
A numeric search that finds nothing returns ``NoWitnessFound``, which is not a proof.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment, minimize_scalar

from .newton_geom import (CFaceDiagram, Face, Region, minimal_points, newton_boundary_of,
                          face_function, minkowski_sum, support_above)
from .poly_core import (MIXED, REAL, MixedPolynomial, NumericMap, PolynomialMap, initial_form,
                        support, vertex_polar_form, wirtinger)
from .search import StratumProblem, levenberg_marquardt, search_stratum, task_seed

DEGENERATE = "Degenerate"
CERTIFIED = "CertifiedNondegenerate"
NO_WITNESS = "NoWitnessFound"

WEAK, STRONG = "weak", "strong"
FLAVORS = ("KND", "SKND", "IKND", "SIKND", "INND", "SINND")

SWEEP_SAMPLES = 4096


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class CheckConfig:
    tol_w: float = 1e-6
    tol_cert: float = 1e-9
    starts: int = 256
    max_iter: int = 50
    seed: int = 0
    zero_face_vacuous: bool = False
    threads: int = 1
    torus_margin: float = 1e-6

    def as_json(self) -> dict:
        return {"tol_w": self.tol_w, "tol_cert": self.tol_cert, "starts": self.starts, "max_iter": self.max_iter,
                "seed": self.seed, "zero_face_vacuous": self.zero_face_vacuous}


DEFAULT_CONFIG = CheckConfig()


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class Witness:
    point: tuple[complex, ...]
    subset_I: tuple[int, ...]
    mode: str
    residual: float
    value: float
    multiplier: tuple[float, ...] = ()

    def as_json(self) -> dict:
        return {"point": [_cplx(z) for z in self.point], "I": list(self.subset_I), "mode": self.mode,
                "residual": self.residual, "value": self.value, "multiplier": list(self.multiplier)}


@dataclass(frozen=True)
class Verdict:
    status: str
    method: str | None = None
    witness: Witness | None = None
    samples: int = 0
    min_residual: float | None = None
    seed: int | None = None
    details: tuple = ()

    @property
    def degenerate(self) -> bool:
        return self.status == DEGENERATE

    def as_json(self) -> dict:
        out = {"status": self.status}
        if self.method:
            out["method"] = self.method
        if self.witness is not None:
            out["witness"] = self.witness.as_json()
        if self.status == NO_WITNESS:
            out.update(samples=self.samples, min_residual=self.min_residual, seed=self.seed)
        if self.details:
            out["details"] = [dict(d) for d in self.details]
        return out


@dataclass
class Obligation:
    label: str
    face: Face | None
    I: tuple[int, ...]
    mode: str
    verdict: Verdict
    extra: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        out = {"label": self.label, "I": list(self.I), "mode": self.mode, "verdict": self.verdict.as_json()}
        if self.face is not None:
            out["face"] = self.face.as_json()
        out.update(self.extra)
        return out


@dataclass
class Report:
    flavor: str
    obligations: list[Obligation]
    diagrams: list[str]
    config: CheckConfig
    notes: dict = field(default_factory=dict)

    @property
    def overall(self) -> str:
        st = [o.verdict.status for o in self.obligations]
        if DEGENERATE in st:
            return "fail"
        if all(s == CERTIFIED for s in st):
            return "pass"
        return "inconclusive"

    def failures(self) -> list[Obligation]:
        return [o for o in self.obligations if o.verdict.degenerate]

    def as_json(self) -> dict:
        return {"flavor": self.flavor, "overall": self.overall, "diagrams": self.diagrams,
                "tolerances": self.config.as_json(), "obligations": [o.as_json() for o in self.obligations],
                "notes": self.notes}

    def to_json(self) -> str:
        return json.dumps(self.as_json(), sort_keys=True)


# ---------------------------------------------------------------- exact sub-checkers

def _is_single_monomial(f: MixedPolynomial) -> bool:
    return len(f) == 1


def _definite(f: MixedPolynomial) -> bool:
    """Nonvanishing on the torus: all terms |x|^2k-type (or even real powers) of one sign."""
    if f.is_zero():
        return False
    signs = set()
    for (nu, mu), c in f.items():
        if c.im != 0:
            return False
        if f.kind == REAL:
            if any(e % 2 for e in nu):
                return False
        elif nu != mu:
            return False
        signs.add(c.re > 0)
    return len(signs) == 1


def _monomial_derivative(f: MixedPolynomial, zero_vars: Sequence[int]) -> int | None:
    """Index i whose derivative pair forbids Oka criticality on the stratum, if any."""
    for i in range(1, f.n + 1):
        d = wirtinger(f, i).restrict_zero(zero_vars)
        if f.kind == REAL:
            if _is_single_monomial(d):
                return i
            continue
        db = wirtinger(f, i, True).restrict_zero(zero_vars)
        if (_is_single_monomial(d) and db.is_zero()) or (_is_single_monomial(db) and d.is_zero()):
            return i
    return None


def strip_monomial(f: MixedPolynomial, I: Sequence[int] | None = None) -> MixedPolynomial:
    """Divide out the largest monomial factor x^a conj(x)^b in the variables of I."""
    if f.is_zero():
        return f
    keep = set(range(f.n)) if I is None else {i - 1 for i in I}
    keys = [k for k, _ in f.items()]
    a = tuple(min(nu[i] for nu, _ in keys) if i in keep else 0 for i in range(f.n))
    b = tuple(min(mu[i] for _, mu in keys) if i in keep else 0 for i in range(f.n))
    if not any(a) and not any(b):
        return f
    sub = lambda x, y: tuple(p - q for p, q in zip(x, y))
    return MixedPolynomial(f.n, {(sub(nu, a), sub(mu, b)): c for (nu, mu), c in f.items()}, f.kind)


def _structural(system: PolynomialMap, I: Sequence[int], mode: str) -> Verdict | None:
    zero_vars = [k for k in range(1, system.n + 1) if k not in I]
    if mode == WEAK:
        # on V a monomial factor that is a unit on the stratum rescales Jacobian rows invertibly
        system = PolynomialMap(tuple(strip_monomial(f, I) for f in system))
        for j, f in enumerate(system):
            r = f.restrict_zero(zero_vars)
            if _is_single_monomial(r) or _definite(r):
                return Verdict(CERTIFIED, "exact-structure", details=(( ("reason", "component nonvanishing on torus"), ("component", j + 1)),))
    if system.p == 1:
        i = _monomial_derivative(system[0], zero_vars)
        if i is not None:
            return Verdict(CERTIFIED, "exact-structure", details=((("reason", "monomial derivative"), ("variable", i)),))
    return None


# ---------------------------------------------------------------- numeric kernel

def _witness_from(prob: StratumProblem, X: np.ndarray, lam: np.ndarray, mode: str, cfg: CheckConfig) -> Witness | None:
    res, val, margin = prob.measure(X[None])
    ok = res[0] <= cfg.tol_cert and margin[0] >= cfg.torus_margin and (mode == STRONG or val[0] <= cfg.tol_cert)
    if not ok or prob.relative(X[None])[0] > cfg.tol_cert:
        return None
    i0 = prob.I[0]
    s = abs(X[i0]) ** (-1.0 / prob.w[i0])
    Y = X.copy()
    Y[prob.I] = X[prob.I] * s ** prob.w[prob.I]
    r2, v2, m2 = prob.measure(Y[None])
    if r2[0] <= cfg.tol_cert and (mode == STRONG or v2[0] <= cfg.tol_cert) and m2[0] >= cfg.torus_margin:
        X, res, val = Y, r2, v2
    pt = tuple(complex(z) for z in X)
    if prob.map.kind == REAL:
        pt = tuple(complex(z.real, 0.0) for z in pt)
    return Witness(pt, tuple(i + 1 for i in prob.I), mode, float(res[0]), float(val[0]), tuple(float(x) for x in lam))


def _numeric(system: PolynomialMap, I: tuple[int, ...], mode: str, cfg: CheckConfig, weight) -> Verdict:
    prob = StratumProblem(system, I, mode == WEAK, weight)
    seed = task_seed(cfg.seed, system_key(system), I, mode)
    rng = np.random.default_rng(seed)
    out = search_stratum(prob, cfg.starts, cfg.max_iter, rng, tol_w=cfg.tol_w)
    combined = np.hypot(out.residual, out.value) if mode == WEAK else out.residual
    for k in range(len(combined)):
        if not combined[k] <= cfg.tol_w:
            continue
        wit = _witness_from(prob, out.points[k], out.multipliers[k], mode, cfg)
        if wit is not None:
            return Verdict(DEGENERATE, "numeric-witness", wit)
    finite = combined[np.isfinite(combined)]
    return Verdict(NO_WITNESS, samples=cfg.starts, min_residual=float(finite.min()) if finite.size else float("inf"), seed=cfg.seed)


def radial_weight(system: PolynomialMap) -> tuple[int, ...] | None:
    """A positive integer weight making every component radially homogeneous, if one exists."""
    from scipy.optimize import linprog
    rows = []
    for f in system:
        pts = sorted(support(f))
        rows += [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
    n = system.n
    res = linprog(np.ones(n), A_eq=np.array(rows, dtype=float) if rows else None, b_eq=np.zeros(len(rows)) if rows else None,
                  bounds=[(1, None)] * n, method="highs")
    if res.status != 0:
        return None
    w = [Fraction(x).limit_denominator(1000) for x in res.x]
    if any(sum(r[k] * w[k] for k in range(n)) != 0 for r in rows):
        return None
    return _weight_ints(w)


def system_key(system: PolynomialMap) -> str:
    return ";".join(f.to_text() for f in system) + f"|{system.kind}|{system.n}"


def _as_map(system) -> PolynomialMap:
    return PolynomialMap.of(system) if isinstance(system, MixedPolynomial) else system


def face_system_check(system, I: Sequence[int], mode: str = WEAK, config: CheckConfig | None = None,
                      weight: Sequence[int] | None = None) -> Verdict:
    """Search Sigma cap V (weak) or Sigma (strong) of a face system on the stratum (K*)^I."""
    system = _as_map(system)
    cfg = config or DEFAULT_CONFIG
    I = tuple(sorted({int(i) for i in I}))
    if not I or I[0] < 1 or I[-1] > system.n:
        raise ValueError(f"invalid stratum {I}")
    if mode not in (WEAK, STRONG):
        raise ValueError(f"mode must be weak or strong, got {mode}")
    w = tuple(int(x) for x in weight) if weight is not None else radial_weight(system)
    return _cached_check(system, I, mode, cfg, w)


@lru_cache(maxsize=4096)
def _cached_check(system: PolynomialMap, I: tuple[int, ...], mode: str, cfg: CheckConfig, weight) -> Verdict:
    if system.is_zero():
        if cfg.zero_face_vacuous:
            return Verdict(CERTIFIED, "exact-structure", details=((("reason", "zero face system, vacuous convention"),),))
        pt = tuple(complex(1.0) if k + 1 in I else 0j for k in range(system.n))
        return Verdict(DEGENERATE, "zero-face", Witness(pt, I, mode, 0.0, 0.0))
    exact = _structural(system, I, mode)
    if exact is not None:
        return exact
    f0 = system[0]
    if (system.n == 2 and system.p == 1 and system.kind == MIXED and mode == WEAK and I == (1, 2)
            and len(support(f0)) == 1):
        return _vertex_weak(f0, cfg)
    return _numeric(system, I, mode, cfg, weight)


# ---------------------------------------------------------------- polar vertex criterion

def _poly_roots(c_low_first: np.ndarray, deg: int) -> np.ndarray:
    """Roots of sum c_i z^i padded with +inf where the degree drops."""
    out = np.full(deg, np.inf + 0j)
    r = np.roots(c_low_first[::-1]) if np.any(c_low_first) else np.array([])
    out[: len(r)] = r
    return out


def _newton(coeffs: np.ndarray, z: complex, steps: int = 40) -> complex:
    c = coeffs[::-1]
    dc = np.polyder(c)
    for _ in range(steps):
        pv, dv = np.polyval(c, z), np.polyval(dc, z)
        if dv == 0:
            break
        dz = pv / dv
        z -= dz
        if abs(dz) < 1e-16 * max(1.0, abs(z)):
            break
    return z


def _trig_unit_roots(laurent: dict) -> list[float]:
    """Real t in [0, 2pi) where sum c_k e^{ikt} = 0."""
    ks = sorted(laurent)
    lo = ks[0]
    coeffs = np.zeros(ks[-1] - lo + 1, dtype=complex)
    for k, c in laurent.items():
        coeffs[k - lo] = complex(c)
    if len(coeffs) == 1:
        return []
    roots = np.roots(coeffs[::-1])
    return sorted(float(np.angle(u) % (2 * np.pi)) for u in roots if abs(abs(u) - 1) < 1e-9)


def unit_root_locus(form, samples: int = SWEEP_SAMPLES) -> list[tuple[float, complex]]:
    """Pairs (t, z) with p_t(z) = 0 and |z| = 1, by root tracking over t."""
    deg = form.degree()
    if deg < 0:
        return []
    if deg == 0:
        return [(t, 1 + 0j) for t in _trig_unit_roots(form.coeffs[0])]
    if form.t_independent:
        c = form.coefficient_values(np.zeros(1))[0, : deg + 1]
        return [(0.0, complex(z)) for z in np.roots(c[::-1]) if abs(abs(z) - 1) < 1e-9]
    ts = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    C = form.coefficient_values(ts)[:, : deg + 1]
    Z = np.empty((samples, deg), dtype=complex)
    Z[0] = _poly_roots(C[0], deg)
    for k in range(1, samples):
        r = _poly_roots(C[k], deg)
        prev = np.where(np.isfinite(Z[k - 1]), Z[k - 1], 1e6)
        cur = np.where(np.isfinite(r), r, 1e6)
        row, col = linear_sum_assignment(np.abs(prev[:, None] - cur[None, :]))
        Z[k, row] = r[col]
    G = np.abs(Z) ** 2 - 1

    def branch_value(t, z_guess):
        c = form.coefficient_values(np.array([t]))[0, : deg + 1]
        return _newton(c, z_guess)

    found: list[tuple[float, complex]] = []
    step = ts[1] - ts[0]
    for b in range(deg):
        g = G[:, b]
        for k in range(samples):
            k2 = (k + 1) % samples
            t0, t1 = ts[k], ts[k] + step
            if not (np.isfinite(g[k]) and np.isfinite(g[k2])):
                continue
            z0 = Z[k, b]
            if g[k] == 0:
                found.append((t0, z0))
                continue
            if g[k] * g[k2] < 0:
                phi = lambda t: abs(branch_value(t, z0)) ** 2 - 1
                try:
                    ts_ = brentq(phi, t0, t1, xtol=1e-15, rtol=1e-15, maxiter=200)
                except ValueError:
                    continue
                found.append((ts_ % (2 * np.pi), branch_value(ts_, z0)))
            else:
                # tangential touch: a local minimum of |g| without a sign change
                km = (k - 1) % samples
                if abs(g[k]) < 1e-3 and abs(g[k]) <= abs(g[km]) and abs(g[k]) <= abs(g[k2]):
                    res = minimize_scalar(lambda t: abs(abs(branch_value(t, z0)) ** 2 - 1),
                                          bounds=(t0 - step, t1), method="bounded", options={"xatol": 1e-14})
                    if res.fun < 1e-10:
                        found.append((float(res.x) % (2 * np.pi), branch_value(res.x, z0)))
    found.sort(key=lambda p: (p[0], p[1].real, p[1].imag))
    merged: list[tuple[float, complex]] = []
    for t, z in found:
        if merged and abs(merged[-1][0] - t) < 1e-9 and abs(merged[-1][1] - z) < 1e-7:
            continue
        merged.append((t, z))
    return merged


def transversality(form, t: float, z: complex) -> float:
    """Im(i z p_z conj(p_t)) at a unit root; zero means the root is Oka-critical."""
    deg = form.degree()
    c = form.coefficient_values(np.array([t]))[0, : deg + 1]
    dc = form.coefficient_derivatives(np.array([t]))[0, : deg + 1]
    pz = sum(i * c[i] * z ** (i - 1) for i in range(1, deg + 1))
    pt = sum(dc[i] * z ** i for i in range(deg + 1))
    return float((1j * z * pz * np.conj(pt)).imag)


def _vertex_witness(form, t: float, z: complex) -> tuple[complex, complex]:
    w = np.sqrt(complex(z))
    return (w, complex(np.exp(1j * t))) if form.axis == 2 else (complex(np.exp(1j * t)), w)


def _vertex_weak(M: MixedPolynomial, cfg: CheckConfig) -> Verdict:
    form = vertex_polar_form(M, axis=2)
    roots = unit_root_locus(form)
    fmap = PolynomialMap.of(M)
    num = NumericMap(fmap)
    details = []
    for t, z in roots:
        Q = transversality(form, t, z)
        pt = _vertex_witness(form, t, z)
        res = float(num.residual(np.array([pt]))[0])
        details.append((("t", t), ("z", _cplx(z)), ("Q", Q), ("residual", res)))
        if res <= cfg.tol_cert:
            val = float(abs(num.values(np.array([pt]))[0, 0]))
            return Verdict(DEGENERATE, "exact-vertex", Witness(pt, (1, 2), WEAK, res, val), details=tuple(details))
        if abs(Q) <= 1e-7:
            # nearly tangential root: polish before deciding
            prob = StratumProblem(fmap, (1, 2), True, None)
            z0 = np.concatenate([prob.from_points(np.array([pt])), prob.initial_multipliers(np.array([pt]))], axis=1)
            z1 = levenberg_marquardt(prob, z0, cfg.max_iter)
            X = prob.to_points(z1[:, : prob.nx])[0]
            wit = _witness_from(prob, X, z1[0, prob.nx:], WEAK, cfg)
            if wit is not None:
                return Verdict(DEGENERATE, "exact-vertex", wit, details=tuple(details))
    return Verdict(CERTIFIED, "exact-vertex", details=tuple(details))


def vertex_knd_2var(M: MixedPolynomial, mode: str = WEAK, config: CheckConfig | None = None) -> Verdict:
    """Polar-form criterion for a two-variable mixed polynomial with one support point."""
    if M.n != 2 or len(support(M)) != 1:
        raise PreconditionError("vertex criterion needs n=2 and a single mixed-support point")
    cfg = config or DEFAULT_CONFIG
    if mode == STRONG:
        return face_system_check(M.as_mixed(), (1, 2), STRONG, cfg)
    return _vertex_weak(M.as_mixed(), cfg)


def unit_roots(M: MixedPolynomial) -> list[tuple[float, complex, float]]:
    """Unit roots (t, z) of the polar vertex polynomial with their transversality values."""
    form = vertex_polar_form(M, axis=2)
    return [(t, z, transversality(form, t, z)) for t, z in unit_root_locus(form)]


# ---------------------------------------------------------------- map-level reports

def _run(tasks, cfg: CheckConfig) -> list[Verdict]:
    def one(task):
        system, I, mode, weight = task
        return face_system_check(system, I, mode, cfg, weight)
    if cfg.threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            return list(ex.map(one, tasks))
    return [one(t) for t in tasks]


def _subsets(n: int):
    for k in range(n, 0, -1):
        yield from combinations(range(1, n + 1), k)


def _weight_ints(w) -> tuple[int, ...]:
    fr = [Fraction(x) for x in w]
    den = math.lcm(*[x.denominator for x in fr])
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def sum_region(regions: Sequence[Region]) -> Region:
    """Minkowski sum of Newton regions, built from vertex sums."""
    sums = [tuple(0 for _ in range(regions[0].n))]
    for R in regions:
        sums = [tuple(a + b for a, b in zip(s, v)) for s in sums for v in R.vertices]
    return Region(minimal_points(sums), regions[0].n)


def check_map(fmap, flavor: str, diagrams: Sequence[CFaceDiagram] | None = None,
              config: CheckConfig | None = None) -> Report:
    fmap = _as_map(fmap)
    cfg = config or DEFAULT_CONFIG
    if flavor not in ("KND", "SKND", "IKND", "SIKND"):
        raise ValueError(f"unknown flavor {flavor}")
    if any(f.is_zero() for f in fmap):
        raise PreconditionError("components must be nonzero")
    mode = STRONG if flavor.startswith("S") else WEAK
    n = fmap.n
    tasks, meta = [], []
    if flavor in ("KND", "SKND"):
        region = sum_region([newton_boundary_of(f) for f in fmap])
        for face in region.faces:
            w = face.generator
            system = PolynomialMap(tuple(initial_form(f, w) for f in fmap))
            tasks.append((system, tuple(range(1, n + 1)), mode, w))
            meta.append((f"face w={list(w)}", face, tuple(range(1, n + 1))))
        names = [f"Gamma(f^{j + 1})" for j in range(fmap.p)]
    else:
        Ds = list(diagrams) if diagrams is not None else [newton_boundary_of(f).to_diagram() for f in fmap]
        if len(Ds) != fmap.p:
            raise PreconditionError(f"expected {fmap.p} diagrams, got {len(Ds)}")
        for j, (f, D) in enumerate(zip(fmap, Ds)):
            above = support_above(support(f), D)
            if not above:
                raise PreconditionError(f"support of component {j + 1} not above its diagram: {above.violations}")
        total = minkowski_sum(Ds).total
        for face in total.inner_faces():
            w = face.generator
            system = PolynomialMap(tuple(face_function(f, D, w) for f, D in zip(fmap, Ds)))
            for I in _subsets(n):
                if face.meets(I):
                    tasks.append((system, I, mode, w))
                    meta.append((f"face w={list(w)}", face, I))
        names = [repr(D) for D in Ds]
    verdicts = _run(tasks, cfg)
    obs = [Obligation(label, face, I, mode, v) for (label, face, I), v in zip(meta, verdicts)]
    return Report(flavor, obs, names, cfg)


def check_innd_2var(f: MixedPolynomial, strong: bool = False, config: CheckConfig | None = None) -> Report:
    """Inner Newton non-degeneracy for two-variable mixed polynomials, face by face."""
    if f.n != 2:
        raise PreconditionError("INND is defined for two variables")
    if f.is_zero():
        raise PreconditionError("zero polynomial")
    f = f.as_mixed()
    cfg = config or DEFAULT_CONFIG
    mode = STRONG if strong else WEAK
    B = newton_boundary_of(f)
    P = B.principal_weights()
    tasks, meta = [], []
    vertex_notes = []

    def add(label, face, w, I):
        system = PolynomialMap.of(initial_form(f, w))
        tasks.append((system, I, mode, w))
        meta.append((label, face, I))

    if not P:
        (v,) = B.vertices
        face = B.face_by_vertices([v])
        for I in ((1,), (2,), (1, 2)):
            add(f"vertex {list(map(int, v))}", face, (1, 1), I)
        vertex_notes.append({"vertex": [int(x) for x in v], "extreme": True})
    else:
        faces = {w: B.face_of_weight(w)[0] for w in P}
        for k, w in enumerate(P):
            face = faces[w]
            strata = [(1, 2)]
            if k == 0:
                strata.append((2,))
            if k == len(P) - 1:
                strata.append((1,))
            for I in strata:
                add(f"edge w={list(w)}", face, w, I)
        for k in range(len(P) - 1):
            a, b = faces[P[k]], faces[P[k + 1]]
            (v,) = set(a.vertices) & set(b.vertices)
            face = B.face_by_vertices([v])
            wv = _weight_ints([x + y for x, y in zip(P[k], P[k + 1])])
            add(f"vertex {[int(x) for x in v]}", face, wv, (1, 2))
            vertex_notes.append({"vertex": [int(x) for x in v], "extreme": False})
        for v in (faces[P[0]].vertices + faces[P[-1]].vertices):
            if not any(d["vertex"] == [int(x) for x in v] for d in vertex_notes):
                vertex_notes.append({"vertex": [int(x) for x in v], "extreme": True})
    verdicts = _run(tasks, cfg)
    obs = [Obligation(label, face, I, mode, v) for (label, face, I), v in zip(meta, verdicts)]
    return Report("SINND" if strong else "INND", obs, ["Gamma(f)"], cfg,
                  notes={"principal_weights": [list(w) for w in P], "vertices": vertex_notes})
