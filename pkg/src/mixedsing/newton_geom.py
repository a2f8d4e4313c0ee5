"""Exact lattice geometry for Newton boundaries and C-face diagrams.

Every region handled here has the form ``conv(V) + R_{>=0}^n``.  Its facets are
found by enumerating supporting hyperplanes through affinely independent
subsets of the minimal points (plus coordinate recession directions); faces
are closures of facet vertex sets and a face is compact when the normals of
the facets containing it cover every coordinate.  All arithmetic is in
``Fraction`` so faces, levels and generators are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Sequence

from .poly_core import MixedPolynomial, as_fraction, support

MAX_POINTS = 64
MAX_DIM = 8

Point = tuple[Fraction, ...]
Weight = tuple[int, ...]


class GeometryError(ValueError):
    pass


def to_point(v: Iterable) -> Point:
    return tuple(as_fraction(x) for x in v)


def canonical_weight(w: Sequence) -> Weight:
    """Scale a nonnegative rational vector to coprime integers."""
    w = [as_fraction(x) for x in w]
    den = reduce(math.lcm, (x.denominator for x in w), 1)
    ints = [int(x * den) for x in w]
    g = reduce(math.gcd, ints, 0)
    return tuple(x // g for x in ints) if g else tuple(ints)


def dot(w: Sequence, v: Sequence) -> Fraction:
    return sum((as_fraction(a) * b for a, b in zip(w, v)), Fraction(0))


def _nullvector(rows: list[list[Fraction]], k: int) -> list[Fraction] | None:
    """Basis vector of a one-dimensional null space, ``None`` if rank < k-1."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                fac = m[i][c]
                m[i] = [a - fac * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if r != k - 1:
        return None
    free = next(c for c in range(k) if c not in pivots)
    vec = [Fraction(0)] * k
    vec[free] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -m[i][free]
    return vec


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, ``None`` if singular."""
    k = len(A)
    m = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for c in range(k):
        piv = next((i for i in range(c, k) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(k):
            if i != c and m[i][c] != 0:
                fac = m[i][c]
                m[i] = [a - fac * bb for a, bb in zip(m[i], m[c])]
    return [m[i][k] for i in range(k)]


def affine_dim(points: Sequence[Point]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    rank, m = 0, [list(r) for r in rows]
    ncol = len(base)
    for c in range(ncol):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                fac = m[i][c] / m[rank][c]
                m[i] = [a - fac * bb for a, bb in zip(m[i], m[rank])]
        rank += 1
    return rank


def minimal_points(points: Iterable[Point]) -> list[Point]:
    """Points not dominated componentwise by another point (vertices live here)."""
    pts = sorted(set(points))
    out = []
    for p in pts:
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in pts):
            out.append(p)
    return out


@dataclass(frozen=True)
class Facet:
    normal: Weight          # nonnegative coprime integers
    level: Fraction         # min of <normal, .> over the region
    points: frozenset[Point]  # minimal points on the facet

    @property
    def compact(self) -> bool:
        return all(x > 0 for x in self.normal)


@dataclass(frozen=True)
class Face:
    vertices: tuple[Point, ...]
    dim: int
    generator: Weight
    level: Fraction          # d(generator; region)
    inner: bool
    I_delta: frozenset[int]  # 1-based coordinates used by the face
    J_delta: frozenset[int] = frozenset()  # indices of functionals equal to 1 on the face
    face_id: int = -1
    points: tuple[Point, ...] = ()  # input points on the face, extreme or not
    cone: tuple[Weight, ...] = ()   # normals of the facets containing the face

    def meets(self, I: Iterable[int]) -> bool:
        """Delta intersects the coordinate subspace R^I (1-based I)."""
        I = set(I)
        return any(all(v[k] == 0 for k in range(len(v)) if k + 1 not in I) for v in self.vertices)

    def as_json(self) -> dict:
        from .poly_core import fmt_rational
        return {
            "id": self.face_id,
            "dim": self.dim,
            "generator": list(self.generator),
            "level": fmt_rational(self.level),
            "inner": self.inner,
            "vertices": [[fmt_rational(x) for x in v] for v in self.vertices],
        }


class Region:
    """``conv(V) + R_{>=0}^n`` with its compact faces enumerated exactly."""

    def __init__(self, points: Iterable[Sequence], n: int | None = None):
        pts = [to_point(p) for p in points]
        if not pts:
            raise GeometryError("empty point set")
        n = n if n is not None else len(pts[0])
        if any(len(p) != n for p in pts):
            raise GeometryError("points of mixed dimension")
        if n > MAX_DIM:
            raise GeometryError(f"dimension {n} above {MAX_DIM}")
        if any(x < 0 for p in pts for x in p):
            raise GeometryError("negative coordinates")
        self.n = n
        self.points = frozenset(pts)
        mins = minimal_points(pts)
        if len(mins) > MAX_POINTS:
            raise GeometryError(f"{len(mins)} minimal points above the limit {MAX_POINTS}")
        self.facets = self._facets(mins)
        self.faces = self._faces()
        self.vertices = tuple(sorted(f.vertices[0] for f in self.faces if f.dim == 0))
        self._by_vertices = {frozenset(f.vertices): f for f in self.faces}

    # -- facets
    def _facets(self, mins: list[Point]) -> tuple[Facet, ...]:
        n = self.n
        found: dict[tuple[Weight, Fraction], Facet] = {}
        for k in range(1, n + 1):
            for zero in combinations(range(n), n - k):
                free = [c for c in range(n) if c not in zero]
                for subset in combinations(mins, k):
                    if k == 1:
                        w_free = [Fraction(1)]
                    else:
                        base = subset[0]
                        rows = [[p[c] - base[c] for c in free] for p in subset[1:]]
                        w_free = _nullvector(rows, k)
                        if w_free is None:
                            continue
                    if all(x <= 0 for x in w_free):
                        w_free = [-x for x in w_free]
                    if any(x < 0 for x in w_free):
                        continue
                    w = [Fraction(0)] * n
                    for c, x in zip(free, w_free):
                        w[c] = x
                    w_int = canonical_weight(w)
                    if not any(w_int):
                        continue
                    level = dot(w_int, subset[0])
                    vals = [dot(w_int, p) for p in mins]
                    if min(vals) < level:
                        continue
                    tight = frozenset(p for p, v in zip(mins, vals) if v == level)
                    key = (w_int, level)
                    if key not in found:
                        found[key] = Facet(w_int, level, tight)
        facets = [f for f in found.values() if self._is_facet(f)]
        return tuple(sorted(facets, key=lambda f: (f.normal, f.level)))

    def _is_facet(self, f: Facet) -> bool:
        # the face spans its vertices plus the recession directions e_i with normal_i = 0
        verts = sorted(f.points)
        zero_cols = [i for i, x in enumerate(f.normal) if x == 0]
        shifted = [tuple(verts[0][c] + (1 if c == i else 0) for c in range(self.n)) for i in zero_cols]
        return affine_dim(verts + shifted) == self.n - 1

    # -- faces
    def _faces(self) -> tuple[Face, ...]:
        sets: set[frozenset[Point]] = {f.points for f in self.facets}
        frontier = set(sets)
        while frontier:
            new = set()
            for a in frontier:
                for b in sets:
                    c = a & b
                    if c and c not in sets:
                        new.add(c)
            sets |= new
            frontier = new
        n = self.n
        extreme = {next(iter(s)) for s in sets if len(s) == 1}
        out = []
        for vs in sets:
            containing = [f for f in self.facets if vs <= f.points]
            cover = {i for f in containing for i, x in enumerate(f.normal) if x > 0}
            if len(cover) != n:
                continue
            gen = canonical_weight([sum(f.normal[i] for f in containing) for i in range(n)])
            verts = tuple(sorted(vs & extreme))
            out.append(
                Face(
                    vertices=verts,
                    dim=affine_dim(list(verts)),
                    generator=gen,
                    level=dot(gen, verts[0]),
                    inner=all(any(v[i] > 0 for v in verts) for i in range(n)),
                    I_delta=frozenset(i + 1 for i in range(n) if any(v[i] > 0 for v in verts)),
                    points=tuple(sorted(vs)),
                    cone=tuple(f.normal for f in containing),
                )
            )
        out.sort(key=lambda f: (f.dim, f.vertices))
        return tuple(_with_id(f, k) for k, f in enumerate(out))

    # -- queries
    def degree(self, w: Sequence) -> Fraction:
        """d(w; region) for strictly positive w."""
        return min(dot(w, v) for v in self.vertices)

    def face_of_weight(self, w: Sequence) -> tuple[Face, Fraction]:
        w = [as_fraction(x) for x in w]
        if any(x <= 0 for x in w):
            raise GeometryError("weight must be strictly positive")
        d = self.degree(w)
        vs = frozenset(v for v in self.vertices if dot(w, v) == d)
        return self._by_vertices[vs], d

    def face_by_vertices(self, verts: Iterable[Sequence]) -> Face | None:
        return self._by_vertices.get(frozenset(to_point(v) for v in verts))

    def contains(self, nu: Sequence) -> bool:
        """nu lies in the region (on or above the boundary)."""
        nu = to_point(nu)
        return all(x >= 0 for x in nu) and all(dot(f.normal, nu) >= f.level for f in self.facets)

    @cached_property
    def compact_facets(self) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if f.dim == self.n - 1)

    def principal_weights(self) -> list[Weight]:
        ws = [f.generator for f in self.compact_facets]
        if self.n == 2:
            return sorted(ws, key=lambda w: Fraction(w[0], w[1]), reverse=True)
        return sorted(ws, reverse=True)

    def inner_faces(self) -> list[Face]:
        return [f for f in self.faces if f.inner]

    @cached_property
    def convenient(self) -> bool:
        return all(any(v[i] > 0 and all(v[k] == 0 for k in range(self.n) if k != i) for v in self.vertices) for i in range(self.n))

    def boundary_points(self) -> list[Point]:
        """Input points lying on some compact face."""
        on_faces = {p for f in self.faces for p in f.points}
        return [p for p in sorted(self.points) if p in on_faces]


def _with_id(face: Face, k: int) -> Face:
    return replace(face, face_id=k)


class BoundaryComplex(Region):
    """Newton boundary Gamma(S) of a lattice set."""

    def to_diagram(self) -> "CFaceDiagram":
        if not self.convenient:
            raise GeometryError("Newton boundary is not convenient; not a C-face diagram")
        return CFaceDiagram.from_points(self.vertices)


@dataclass(frozen=True)
class LinearFunctional:
    w: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(as_fraction(x) for x in self.w)
        if not w or any(x <= 0 for x in w):
            raise GeometryError(f"functional must be strictly positive, got {w}")
        object.__setattr__(self, "w", w)

    def __call__(self, nu: Sequence) -> Fraction:
        return dot(self.w, nu)


class CFaceDiagram(Region):
    """D(J) = {nu >= 0 : min_J l(nu) = 1} with its compact faces."""

    functionals: tuple[LinearFunctional, ...]
    redundant: tuple[LinearFunctional, ...]

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "CFaceDiagram":
        self = cls.__new__(cls)
        Region.__init__(self, points)
        if not self.convenient:
            raise GeometryError("point set is not convenient; not a C-face diagram")
        self.functionals = tuple(LinearFunctional(tuple(Fraction(x) / f.level for x in f.generator)) for f in self.compact_facets)
        self.redundant = ()
        self._tag_functionals()
        return self

    def _tag_functionals(self):
        tagged = []
        for f in self.faces:
            J = frozenset(k for k, l in enumerate(self.functionals) if all(l(v) == 1 for v in f.vertices))
            tagged.append(replace(f, J_delta=J))
        self.faces = tuple(tagged)
        self._by_vertices = {frozenset(f.vertices): f for f in self.faces}

    def ell(self, nu: Sequence) -> Fraction:
        return min(l(nu) for l in self.functionals)

    def __repr__(self):
        from .poly_core import fmt_rational
        fs = ", ".join("(" + ",".join(fmt_rational(x) for x in l.w) + ")" for l in self.functionals)
        return f"CFaceDiagram(n={self.n}, J=[{fs}])"

    def __eq__(self, other):
        return isinstance(other, Region) and self.n == other.n and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)


def newton_boundary(S: Iterable[Sequence]) -> BoundaryComplex:
    return BoundaryComplex(S)


def newton_boundary_of(f: MixedPolynomial) -> BoundaryComplex:
    return BoundaryComplex(sorted(support(f)), f.n)


def diagram_from_functionals(J: Iterable) -> CFaceDiagram:
    """Build D(J); redundant functionals are dropped and kept in ``.redundant``."""
    fs = [l if isinstance(l, LinearFunctional) else LinearFunctional(tuple(l)) for l in J]
    if not fs:
        raise GeometryError("empty functional set")
    n = len(fs[0].w)
    if any(len(l.w) != n for l in fs):
        raise GeometryError("functionals of mixed dimension")
    verts = set()
    for z in range(n):
        for zero in combinations(range(n), z):
            free = [c for c in range(n) if c not in zero]
            for chosen in combinations(fs, len(free)):
                A = [[l.w[c] for c in free] for l in chosen]
                sol = _solve(A, [Fraction(1)] * len(free))
                if sol is None or any(x < 0 for x in sol):
                    continue
                nu = [Fraction(0)] * n
                for c, x in zip(free, sol):
                    nu[c] = x
                if all(l(nu) >= 1 for l in fs):
                    verts.add(tuple(nu))
    D = CFaceDiagram.from_points(verts)
    kept = {l.w for l in D.functionals}
    # report input functionals in input order
    D.functionals = tuple(l for l in _dedupe(fs) if l.w in kept)
    D.redundant = tuple(l for l in _dedupe(fs) if l.w not in kept)
    D._tag_functionals()
    return D


def _dedupe(fs):
    seen, out = set(), []
    for l in fs:
        if l.w not in seen:
            seen.add(l.w)
            out.append(l)
    return out


def face_of_weight(D: Region, w: Sequence) -> tuple[Face, Fraction]:
    return D.face_of_weight(w)


def principal_weights(D: Region) -> list[Weight]:
    return D.principal_weights()


def inner_faces(D: Region) -> list[Face]:
    return D.inner_faces()


# ---------------------------------------------------------------- Minkowski sums

@dataclass
class SumDiagram:
    summands: tuple[CFaceDiagram, ...]
    total: CFaceDiagram
    decomposition: dict[int, tuple[Face, ...]] = field(default_factory=dict)

    def decompose(self, face: Face) -> tuple[Face, ...]:
        return self.decomposition[face.face_id]


def minkowski_sum(Ds: Sequence[CFaceDiagram]) -> SumDiagram:
    Ds = tuple(Ds)
    if not Ds:
        raise GeometryError("empty summand list")
    if len({D.n for D in Ds}) != 1:
        raise GeometryError("summands of mixed dimension")
    if len(Ds) == 1:
        total = Ds[0]
    elif all(D.vertices == Ds[0].vertices for D in Ds):
        # D + ... + D = pD for a convex region; avoids the hull of all vertex sums
        total = CFaceDiagram.from_points([tuple(len(Ds) * x for x in v) for v in Ds[0].vertices])
    else:
        sums = [()]
        for D in Ds:
            sums = [tuple(a + b for a, b in zip(s, v)) if s else v for s in sums for v in D.vertices]
        total = CFaceDiagram.from_points(minimal_points(sums))
    dec = {f.face_id: tuple(D.face_of_weight(f.generator)[0] for D in Ds) for f in total.faces}
    return SumDiagram(Ds, total, dec)


# ---------------------------------------------------------------- support tests

@dataclass(frozen=True)
class AboveResult:
    ok: bool
    violations: tuple[Point, ...]

    def __bool__(self):
        return self.ok


def support_above(S: Iterable[Sequence], D: Region) -> AboveResult:
    """S lies in D + R_{>=0}^n; cross-checked against the P(D)-degree form."""
    pts = [to_point(p) for p in S]
    bad = tuple(p for p in pts if not D.contains(p))
    by_member = not bad
    if isinstance(D, CFaceDiagram) and pts:
        by_degree = all(min(dot(w, p) for p in pts) >= D.degree(w) for w in D.principal_weights())
        if by_degree != by_member:
            raise AssertionError("membership and principal-degree tests disagree")
    return AboveResult(by_member, bad)


# ---------------------------------------------------------------- inner extension

@dataclass(frozen=True)
class InnerExtension:
    q_prime: tuple[Fraction, ...]
    w: tuple[Fraction, ...]
    theta: tuple[Point, ...]      # Delta(q'; D), may be a non-compact-free face inside R^I
    theta_prime: Face
    degree: Fraction


def find_inner_extension(D: Region, q: Sequence) -> InnerExtension:
    """Constructive weight-lowering: an inner face extending the q-face on R^I."""
    q = [as_fraction(x) for x in q]
    n = D.n
    if len(q) != n or any(x < 0 for x in q) or not any(q):
        raise GeometryError("q must be a nonzero nonnegative vector")
    I = {i for i in range(n) if q[i] != 0}
    on_I = [v for v in D.vertices if all(v[k] == 0 for k in range(n) if k not in I)]
    if not on_I:
        raise GeometryError("diagram does not meet R^I")
    d = min(dot(q, v) for v in on_I)
    theta = tuple(v for v in on_I if dot(q, v) == d)
    alpha = min(x for v in D.vertices for x in v if x > 0)
    q_prime = [q[i] if i in I else d / alpha + 1 for i in range(n)]
    w = list(q_prime)
    I_theta = {i for i in range(n) if any(v[i] > 0 for v in theta)}
    face_verts = set(theta)
    while True:
        covered = {i for i in range(n) if any(v[i] > 0 for v in face_verts)}
        if len(covered) == n:
            break
        low = [i for i in range(n) if i not in covered]
        # scale the uncovered coordinates by s until a new vertex reaches level d
        best = None
        for v in D.vertices:
            off = sum((w[i] * v[i] for i in low), Fraction(0))
            if off == 0:
                continue
            on = sum((w[i] * v[i] for i in range(n) if i not in low), Fraction(0))
            s = (d - on) / off
            if best is None or s > best:
                best = s
        if best is None or best <= 0:
            raise GeometryError("weight lowering failed to reach an inner face")
        for i in low:
            w[i] *= best
        face_verts = {v for v in D.vertices if dot(w, v) == d}
    face, dw = D.face_of_weight(w)
    assert dw == d
    assert all(w[i] == q_prime[i] for i in I_theta)
    return InnerExtension(tuple(q_prime), tuple(w), theta, face, d)


# ---------------------------------------------------------------- face functions and condition (iv)

def face_function(f: MixedPolynomial, D: Region, w: Sequence) -> MixedPolynomial:
    """Terms of f at the level d(w; D)."""
    from .poly_core import face_terms
    return face_terms(f, w, D.degree(w))


def _cone_escapes(cone: Sequence[Weight], I: Sequence[int], n: int) -> tuple[float, ...] | None:
    """A weight in the open cone with w_i > min_j w_j for every i in I, or None."""
    import numpy as np
    from itertools import product
    from scipy.optimize import linprog

    G = np.array(cone, dtype=float).T  # n x r
    r = G.shape[1]
    for targets in product(*[[j for j in range(n) if j != i] for i in I]):
        # lambda_k >= 1 keeps w in the relative interior (the cone is scale free)
        A, b = [], []
        for i, j in zip(I, targets):
            A.append(-(G[i] - G[j]))
            b.append(-1.0)
        res = linprog(np.zeros(r), A_ub=np.array(A), b_ub=np.array(b), bounds=[(1, None)] * r, method="highs")
        if res.status == 0:
            return tuple(float(x) for x in G @ res.x)
    return None


@dataclass(frozen=True)
class AxisViolation:
    face: Face
    I: frozenset[int]
    weight: tuple[float, ...]


def axis_condition(components: Sequence[MixedPolynomial], Ds: Sequence[CFaceDiagram]) -> list[AxisViolation]:
    """Inner faces of D_1+...+D_p meeting R^I with vanishing restricted face map
    but no i in I of minimal weight; empty list means the condition holds."""
    S = minkowski_sum(Ds)
    n = S.total.n
    out = []
    for face in S.total.inner_faces():
        parts = S.decompose(face)
        fdelta = [face_function(f, D, face.generator) for f, D in zip(components, Ds)]
        for size in range(1, n + 1):
            for I in combinations(range(1, n + 1), size):
                if not face.meets(I):
                    continue
                off = [k for k in range(1, n + 1) if k not in I]
                if not all(g.restrict_zero(off).is_zero() for g in fdelta):
                    continue
                esc = _cone_escapes(face.cone, [i - 1 for i in I], n)
                if esc is not None:
                    out.append(AxisViolation(face, frozenset(I), esc))
        del parts
    return out


# ---------------------------------------------------------------- D_v construction (three variables)

@dataclass(frozen=True)
class AxisFill:
    i: int                      # non-convenient axis (1-based)
    j: int
    k: int
    p: Point
    q: Point
    threshold: Fraction         # lower bound (strict) for v_i
    upper: Fraction | None      # upper bound from negative denominators, if any
    v: Fraction
    fill_weight: tuple[Fraction, ...]
    faces: tuple[Face, ...]     # inner faces of D_v meeting R^{i}
    unique: bool
    axis_ok: bool               # condition (iv) for I = {i}


@dataclass(frozen=True)
class DvResult:
    diagram: CFaceDiagram
    v: tuple[Fraction, ...]
    nonconvenient: tuple[int, ...]
    fills: tuple[AxisFill, ...]
    hypotheses_ok: bool
    notes: tuple[str, ...]
    axis_violations: tuple[AxisViolation, ...]

    @property
    def axis_ok(self) -> bool:
        return not self.axis_violations


def nonconvenient_axes(B: Region) -> tuple[int, ...]:
    return tuple(
        i + 1 for i in range(B.n)
        if not any(v[i] > 0 and all(v[k] == 0 for k in range(B.n) if k != i) for v in B.vertices)
    )


def _on_plane(p: Point, axes: set[int]) -> bool:
    return all(p[c] == 0 for c in range(len(p)) if c + 1 not in axes)


def _fill_data(f_support, B: BoundaryComplex, i: int):
    on_gamma = {p for face in B.faces for p in face.points}
    notes = []
    for j in (c for c in (1, 2, 3) if c != i):
        cands = sorted(p for p in f_support if p in on_gamma and _on_plane(p, {i, j}) and p[j - 1] == 1)
        if cands:
            p = cands[0]
            break
    else:
        return None, [f"axis {i}: no support point on Gamma in a coordinate plane with unit exponent"]
    k = ({1, 2, 3} - {i, j}).pop()
    gamma_ik = [v for face in B.faces for v in face.vertices if _on_plane(v, {i, k})]
    if not gamma_ik:
        return None, [f"axis {i}: Gamma misses the plane R^{{{i},{k}}}"]
    qk = min(v[k - 1] for v in gamma_ik)
    q = min(v for v in gamma_ik if v[k - 1] == qk)
    lo, hi = Fraction(0), None
    for nu in f_support:
        if nu in (p, q) or (nu[k - 1], nu[j - 1]) == (0, 1):
            continue
        num = nu[k - 1] * q[i - 1] + nu[j - 1] * p[i - 1] * q[k - 1] - nu[i - 1] * q[k - 1]
        den = nu[k - 1] + q[k - 1] * (nu[j - 1] - 1)
        if den > 0:
            lo = max(lo, num / den)
        elif den < 0:
            bound = num / den
            hi = bound if hi is None else min(hi, bound)
        elif num >= 0:
            notes.append(f"axis {i}: support point {tuple(map(str, nu))} blocks the fill inequality")
    return (j, k, p, q, lo, hi), notes


def build_Dv(f: MixedPolynomial, v: Sequence | None = None, cap: int = 10**6) -> DvResult:
    """Fill the non-convenient axes of a three-variable f and build Gamma(S_v)."""
    if f.n != 3:
        raise GeometryError("D_v construction is defined for three variables")
    supp = sorted(to_point(p) for p in support(f))
    B = BoundaryComplex(supp, 3)
    inc = nonconvenient_axes(B)
    notes: list[str] = []
    hyp_ok = True
    for a, b in combinations((1, 2, 3), 2):
        on_gamma = {p for face in B.faces for p in face.points}
        if not any(p in on_gamma and _on_plane(p, {a, b}) for p in supp):
            hyp_ok = False
            notes.append(f"no support point of Gamma in R^{{{a},{b}}}")
    data = {}
    for i in inc:
        d, extra = _fill_data(supp, B, i)
        notes.extend(extra)
        if d is None or extra:
            hyp_ok = False
        data[i] = d
    if v is not None:
        vv = [as_fraction(x) for x in v]
        if len(vv) != 3:
            raise GeometryError("v must have three entries")
        missing = [i for i in inc if vv[i - 1] <= 0]
        if missing:
            raise GeometryError(f"v must be positive on the non-convenient axes {missing}")
    else:
        if not hyp_ok:
            raise GeometryError("; ".join(notes) or "fill hypotheses fail")
        vv = [Fraction(0)] * 3
        for i in inc:
            vv[i - 1] = Fraction(math.floor(data[i][4]) + 1)

    def assemble(vec):
        pts = list(supp) + [tuple(vec[i - 1] if c == i - 1 else Fraction(0) for c in range(3)) for i in inc]
        return CFaceDiagram.from_points(minimal_points(pts))

    def axis_faces(D, i):
        return tuple(fc for fc in D.inner_faces() if fc.meets({i}))

    def axis_ok(D, i):
        return all(_cone_escapes(fc.cone, [i - 1], 3) is None for fc in axis_faces(D, i))

    if v is None:
        # raise each v_i to the least integer meeting condition (iv) on its axis
        for i in inc:
            lo = vv[i - 1]
            if not axis_ok(assemble(vv), i):
                step = Fraction(1)
                while True:
                    cand = lo + step
                    if cand > cap:
                        raise GeometryError(f"axis {i}: condition (iv) not reached below {cap}")
                    vv[i - 1] = cand
                    if axis_ok(assemble(vv), i):
                        break
                    lo, step = cand, step * 2
                hi_ok = vv[i - 1]
                while hi_ok - lo > 1:
                    mid = Fraction(math.floor((lo + hi_ok) / 2))
                    vv[i - 1] = mid
                    if axis_ok(assemble(vv), i):
                        hi_ok = mid
                    else:
                        lo = mid
                vv[i - 1] = hi_ok
    D = assemble(vv)
    fills = []
    for i in inc:
        faces = axis_faces(D, i)
        if data[i] is None:
            fills.append(AxisFill(i, 0, 0, (), (), Fraction(0), None, vv[i - 1], (), faces, len(faces) == 1, axis_ok(D, i)))
            continue
        j, k, p, q, lo, hi = data[i]
        vi = vv[i - 1]
        w = [Fraction(0)] * 3
        w[i - 1] = Fraction(1)
        w[k - 1] = (vi - q[i - 1]) / q[k - 1]
        w[j - 1] = vi - p[i - 1]
        fills.append(AxisFill(i, j, k, p, q, lo, hi, vi, tuple(w), faces, len(faces) == 1, axis_ok(D, i)))
    viol = tuple(axis_condition([f], [D]))
    return DvResult(D, tuple(vv), inc, tuple(fills), hyp_ok, tuple(notes), viol)
