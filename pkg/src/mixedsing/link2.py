"""Links of two-variable mixed polynomials: niceness, boundary pieces, strand tracking, braids and linking numbers.

For a principal weight w_i of the inner diagram the piece g_i(x1, e^{it2}) is the
face function f_{Delta_i} with x2 placed on the unit circle; the last piece
h_N(e^{it1}, x2) puts x1 on the circle instead.  Zero sets of the pieces are
followed over the circle parameter as braided strands.

Braid convention: strands are projected to Re(e^{i alpha} z) for a fixed
generic alpha; a letter s_k^{+1} is emitted when the strand at position k moves
to position k+1 while its Im(e^{i alpha} z) exceeds that of the strand it passes.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .classes import gamma_inn
from .deform import DeformationFamily, _report_status, theta_degree_ok
from .newton_geom import CFaceDiagram, Region, face_function, newton_boundary_of
from .nondegen import DEFAULT_CONFIG, CheckConfig, PreconditionError, check_map, unit_roots
from .poly_core import ExactComplex, MixedPolynomial, PolynomialMap, support

SWEEP = 4096
MERGE_TOL = 1e-7
DEGREE_CAP = 16
CHECKPOINT = 256
CONVENTION = ("positive letter: the strand moving from position k to k+1 has the larger Im(e^{i alpha} z); "
              "components oriented by increasing circle parameter")


class LinkError(ValueError):
    pass


# ---------------------------------------------------------------- niceness

@dataclass
class VertexNiceness:
    vertex: tuple
    nice: bool
    reason: str
    witnesses: list = field(default_factory=list)     # (t, z, (x1, x2))

    def as_json(self) -> dict:
        return {"vertex": [str(x) for x in self.vertex], "nice": self.nice, "reason": self.reason,
                "witnesses": [{"t": t, "z": [z.real, z.imag], "point": [[p.real, p.imag] for p in pt]}
                              for t, z, pt in self.witnesses]}


@dataclass
class NiceReport:
    vertices: list[VertexNiceness]

    @property
    def nice(self) -> bool:
        return all(v.nice for v in self.vertices)

    def failures(self) -> list[VertexNiceness]:
        return [v for v in self.vertices if not v.nice]

    def as_json(self) -> dict:
        return {"nice": self.nice, "vertices": [v.as_json() for v in self.vertices]}


def inner_vertices(D: Region) -> list[tuple]:
    """Vertices shared by two compact edges (the non-extreme vertices)."""
    count: dict[tuple, int] = {}
    for e in D.compact_facets:
        for v in e.vertices:
            count[v] = count.get(v, 0) + 1
    return sorted(v for v, c in count.items() if c >= 2)


def check_nice(f: MixedPolynomial, D: Region | None = None) -> NiceReport:
    """Unit-root sweep of the polar vertex polynomial at every non-extreme vertex of D (default Gamma(f))."""
    if f.n != 2:
        raise PreconditionError("niceness is defined for two variables")
    f = f.as_mixed()
    D = D if D is not None else newton_boundary_of(f)
    out = []
    for v in inner_vertices(D):
        M = f.filter(lambda k, v=v: tuple(a + b for a, b in zip(*k)) == tuple(v))
        if M.is_zero():
            out.append(VertexNiceness(v, False, "zero face"))
            continue
        wit = []
        for t, z, _ in unit_roots(M):
            x1 = complex(np.sqrt(complex(z)))
            wit.append((float(t), complex(z), (x1, complex(np.exp(1j * t)))))
        out.append(VertexNiceness(v, not wit, "unit roots" if wit else "no unit roots", wit))
    return NiceReport(out)


# ---------------------------------------------------------------- boundary pieces

INNER, MIDDLE, OUTER = "inner", "middle", "outer"
DOMAINS = {INNER: "CxS1", MIDDLE: "C*xS1", OUTER: "S1xC"}


@dataclass(frozen=True)
class BoundaryPiece:
    """Mixed polynomial in the free variable with Laurent coefficients in e^{it}.

    ``terms`` maps (m, n) to {l: c}: the coefficient of z^m conj(z)^n is sum_l c e^{ilt}.
    """

    index: int
    role: str
    weight: tuple[int, int]
    k: Fraction
    face: MixedPolynomial
    free: int
    terms: tuple

    @property
    def domain(self) -> str:
        return DOMAINS[self.role]

    @property
    def name(self) -> str:
        return f"{'h' if self.free == 2 else 'g'}_{self.index}"

    def term_dict(self) -> dict:
        return {mn: dict(lc) for mn, lc in self.terms}

    def degree(self) -> int:
        return max((m + n for (m, n), _ in self.terms), default=0)

    def compiled(self):
        mn = np.array([mn for mn, _ in self.terms], dtype=int).reshape(-1, 2)
        laur = [[(l, complex(c)) for l, c in lc] for _, lc in self.terms]
        return mn, laur

    def to_text(self) -> str:
        z = f"x{self.free}"
        t = f"t{3 - self.free}"
        parts = []
        for (m, n), lc in self.terms:
            mono = "*".join(([z if m == 1 else f"{z}^{m}"] if m else []) + ([f"~{z}" if n == 1 else f"~{z}^{n}"] if n else []))
            coef = " + ".join((f"{c.to_text()}*" if c != ExactComplex(1) else "")
                              + (f"e^{{{l}i{t}}}" if l else "1") for l, c in lc)
            coef = f"({coef})" if len(lc) > 1 else coef
            parts.append(f"{coef}*{mono}" if mono else coef)
        return " + ".join(parts) if parts else "0"

    def as_json(self) -> dict:
        return {"name": self.name, "role": self.role, "domain": self.domain, "weight": list(self.weight),
                "k": str(self.k), "face": self.face.to_text(), "text": self.to_text()}


def _piece(f_face: MixedPolynomial, index: int, role: str, w, free: int) -> BoundaryPiece:
    acc: dict = {}
    a, b = (0, 1) if free == 1 else (1, 0)
    for (nu, mu), c in f_face.items():
        key = (nu[a], mu[a])
        l = nu[b] - mu[b]
        slot = acc.setdefault(key, {})
        slot[l] = slot.get(l, ExactComplex(0)) + c
    terms = tuple(sorted((mn, tuple(sorted((l, c) for l, c in lc.items() if c))) for mn, lc in acc.items()))
    terms = tuple((mn, lc) for mn, lc in terms if lc)
    w = tuple(int(x) for x in w)
    return BoundaryPiece(index, role, w, Fraction(w[0], w[1]), f_face, free, terms)


def boundary_pieces(f: MixedPolynomial, P: Sequence | None = None, diagram: Region | None = None,
                    config: CheckConfig | None = None) -> list[BoundaryPiece]:
    """g_1..g_{N-1} and h_N for the weights P (default: principal weights of the inner diagram).

    With a single weight the lone piece is h_1 when the x2-axis vertex carries
    terms, else g_1.
    """
    f = f.as_mixed()
    if diagram is None:
        diagram = gamma_inn(f, config).diagram
    P = list(P) if P is not None else diagram.principal_weights()
    if not P:
        raise PreconditionError("no principal weights")
    faces = [face_function(f, diagram, w) for w in P]
    if any(g.is_zero() for g in faces):
        raise PreconditionError("a principal face carries no terms")
    N = len(P)
    if N == 1:
        on_x2 = any(p[0] == 0 for p in support(faces[0]))
        return [_piece(faces[0], 1, OUTER, P[0], 2) if on_x2 else _piece(faces[0], 1, INNER, P[0], 1)]
    out = []
    for i, (w, g) in enumerate(zip(P, faces), start=1):
        if i == N:
            out.append(_piece(g, i, OUTER, w, 2))
        else:
            out.append(_piece(g, i, INNER if i == 1 else MIDDLE, w, 1))
    return out


# ---------------------------------------------------------------- numeric roots of a piece

class PieceEvaluator:
    def __init__(self, piece: BoundaryPiece):
        if piece.degree() > DEGREE_CAP:
            raise LinkError(f"piece degree {piece.degree()} above cap {DEGREE_CAP}")
        self.piece = piece
        self.mn, self.laur = piece.compiled()
        self.m = self.mn[:, 0]
        self.n = self.mn[:, 1]
        self.deg = self.m + self.n

    def coeffs(self, t: float) -> np.ndarray:
        return np.array([sum(c * np.exp(1j * l * t) for l, c in lc) for lc in self.laur], dtype=complex)

    def values(self, c: np.ndarray, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)[..., None]
        return (c * z ** self.m * np.conj(z) ** self.n).sum(-1)

    def derivs(self, c: np.ndarray, z: np.ndarray):
        z = np.asarray(z, dtype=complex)[..., None]
        zc = np.conj(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            gz = (c * self.m * np.where(self.m > 0, z ** np.maximum(self.m - 1, 0), 0) * zc ** self.n).sum(-1)
            gzb = (c * self.n * z ** self.m * np.where(self.n > 0, zc ** np.maximum(self.n - 1, 0), 0)).sum(-1)
        return gz, gzb

    def newton(self, c: np.ndarray, z: np.ndarray, iters: int = 30):
        z = np.array(z, dtype=complex)
        ok = np.zeros(z.shape, dtype=bool)
        scale = np.abs(c).sum()
        for _ in range(iters):
            g = self.values(c, z)
            gz, gzb = self.derivs(c, z)
            # real Jacobian of (Re g, Im g) in (x, y): columns gz + gzb and i(gz - gzb)
            gx, gy = gz + gzb, 1j * (gz - gzb)
            det = gx.real * gy.imag - gy.real * gx.imag
            safe = np.where(np.abs(det) > 1e-300, det, 1e-300)
            dx = (gy.imag * g.real - gy.real * g.imag) / safe
            dy = (-gx.imag * g.real + gx.real * g.imag) / safe
            step = dx + 1j * dy
            z = z - step
            ok = np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(z))
            if np.all(ok):
                break
        g = self.values(c, z)
        ok = ok & (np.abs(g) <= 1e-9 * max(scale, 1e-300) * np.maximum(1.0, np.abs(z)) ** self.deg.max(initial=0))
        return z, ok

    def root_radius(self, c: np.ndarray) -> float:
        D = int(self.deg.max(initial=0))
        top = self.deg == D
        th = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
        e = np.exp(1j * th)[:, None]
        PD = np.abs((c[top] * e ** (self.m[top] - self.n[top])).sum(-1))
        mu = PD.min() - (np.abs(c[top]) * np.abs(self.m[top] - self.n[top])).sum() * (np.pi / 2048)
        low = np.abs(c[~top]).sum()
        if mu <= 1e-12 * np.abs(c[top]).sum():
            raise LinkError("leading part vanishes on a circle: zero set not bounded (check niceness)")
        return max(1.0, 1.05 * low / mu) * 1.01

    def roots(self, t: float) -> np.ndarray:
        """All roots by box subdivision with a term-bound exclusion test, then Newton."""
        c = self.coeffs(t)
        R = self.root_radius(c)
        ac = np.abs(c)
        boxes = np.array([[0.0, 0.0, R]])
        hmin = R * 2.0 ** -12
        while boxes.size and boxes[0, 2] > hmin:
            h = boxes[:, 2] / 2
            cen = np.concatenate([boxes[:, :2] + np.stack([s1 * h, s2 * h], 1) for s1 in (-1, 1) for s2 in (-1, 1)])
            hh = np.tile(h, 4)
            zc = cen[:, 0] + 1j * cen[:, 1]
            rho = np.abs(zc)
            val = np.abs(self.values(c, zc))
            bound = (ac * ((rho[:, None] + hh[:, None] * math.sqrt(2)) ** self.deg - rho[:, None] ** self.deg)).sum(-1)
            keep = val <= bound * (1 + 1e-9)
            boxes = np.column_stack([cen[keep], hh[keep]])
            if len(boxes) > 200000:
                raise LinkError("root subdivision did not separate roots")
        if not boxes.size:
            return np.zeros(0, dtype=complex)
        z, ok = self.newton(c, boxes[:, 0] + 1j * boxes[:, 1])
        z = z[ok & (np.abs(z) <= 2 * R)]
        out: list[complex] = []
        for r in sorted(z, key=lambda u: (round(u.real, 9), round(u.imag, 9))):
            if all(abs(r - q) > 1e-9 * max(1.0, abs(r)) for q in out):
                out.append(complex(r))
        return np.array(out, dtype=complex)


# ---------------------------------------------------------------- strands and braids

@dataclass
class BraidWord:
    strands: int
    letters: tuple[int, ...]

    def reduced(self) -> "BraidWord":
        st: list[int] = []
        for a in self.letters:
            if st and st[-1] == -a:
                st.pop()
            else:
                st.append(a)
        return BraidWord(self.strands, tuple(st))

    def permutation(self) -> tuple[int, ...]:
        """Position permutation of the underlying symmetric-group word."""
        pos = list(range(self.strands))
        for a in self.letters:
            k = abs(a) - 1
            pos[k], pos[k + 1] = pos[k + 1], pos[k]
        return tuple(pos)

    def to_text(self) -> str:
        if not self.letters:
            return "e"
        out, run = [], None
        for a in self.letters:
            if run and run[0] == a:
                run[1] += 1
            else:
                if run:
                    out.append(run)
                run = [a, 1]
        out.append(run)
        return " ".join(f"s{abs(a)}" + (f"^{c if a > 0 else -c}" if c != 1 or a < 0 else "") for a, c in out)

    def as_json(self) -> dict:
        return {"strands": self.strands, "letters": list(self.letters), "text": self.to_text()}


@dataclass
class TorusCurve:
    piece: str
    domain: str
    t: np.ndarray                 # (T,) increasing, from 0 to 2pi inclusive
    samples: np.ndarray           # (T, M) complex
    strand_count: int
    closure_permutation: tuple[int, ...]   # strand j at 2pi is strand perm[j] at 0
    alpha: float = 0.0

    def components(self) -> list[list[int]]:
        seen, out = set(), []
        for j in range(self.strand_count):
            if j in seen:
                continue
            cyc = [j]
            seen.add(j)
            k = self.closure_permutation[j]
            while k != j:
                cyc.append(k)
                seen.add(k)
                k = self.closure_permutation[k]
            out.append(cyc)
        return out

    def to_csv(self, handle=None) -> str:
        buf = handle or io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "strand_id", "re", "im"])
        for k, t in enumerate(self.t):
            for j in range(self.strand_count):
                z = self.samples[k, j]
                w.writerow([repr(float(t)), j, repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue() if handle is None else ""

    def as_json(self) -> dict:
        return {"piece": self.piece, "domain": self.domain, "strand_count": self.strand_count,
                "closure_permutation": list(self.closure_permutation), "samples": int(len(self.t)),
                "components": self.components()}


def _generic_alpha(Z0: np.ndarray) -> float:
    best, arg = -1.0, 0.0
    for k in range(64):
        a = 0.1 + k * (math.pi / 64)
        u = (np.exp(1j * a) * Z0).real
        if len(u) < 2:
            return a
        du = np.abs(u[:, None] - u[None, :])
        np.fill_diagonal(du, math.inf)
        d = du.min()
        if d > best * 1.5:
            best, arg = d, a
    return arg


def braid_from_strands(t: np.ndarray, Z: np.ndarray, alpha: float) -> BraidWord:
    """Letters from order changes of Re(e^{i alpha} z) between consecutive samples."""
    T, M = Z.shape
    if M < 2:
        return BraidWord(M, ())
    W = np.exp(1j * alpha) * Z
    U, V = W.real, W.imag
    order = list(np.argsort(U[0], kind="stable"))
    letters = []
    for k in range(T - 1):
        du0 = U[k][:, None] - U[k][None, :]
        du1 = U[k + 1][:, None] - U[k + 1][None, :]
        a_idx, b_idx = np.nonzero(np.triu((du0 * du1) < 0, 1))
        if not len(a_idx):
            continue
        events = []
        for a, b in zip(a_idx, b_idx):
            s = du0[a, b] / (du0[a, b] - du1[a, b])
            events.append((s, a, b))
        events.sort()
        for s, a, b in events:
            pa, pb = order.index(a), order.index(b)
            if abs(pa - pb) != 1:
                raise LinkError("ambiguous crossing order; sample more densely")
            left, right = (a, b) if pa < pb else (b, a)
            v_left = V[k, left] + s * (V[k + 1, left] - V[k, left])
            v_right = V[k, right] + s * (V[k + 1, right] - V[k, right])
            pos = min(pa, pb)
            letters.append((pos + 1) if v_left > v_right else -(pos + 1))
            order[pos], order[pos + 1] = order[pos + 1], order[pos]
    return BraidWord(M, tuple(letters))


@dataclass
class TracedPiece:
    piece: BoundaryPiece
    curve: TorusCurve
    braid: BraidWord
    component_braids: list[BraidWord]

    def as_json(self) -> dict:
        return {"piece": self.piece.as_json(), "curve": self.curve.as_json(), "braid": self.braid.as_json(),
                "component_braids": [b.as_json() for b in self.component_braids]}


def _min_sep(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, math.inf)
    return float(d.min())


def _match(prev: np.ndarray, cur: np.ndarray) -> tuple[np.ndarray, float]:
    cost = np.abs(prev[:, None] - cur[None, :])
    r, c = linear_sum_assignment(cost)
    out = np.empty_like(prev)
    out[r] = cur[c]
    return out, float(cost[r, c].max()) if len(r) else 0.0


def trace_link_piece(piece: BoundaryPiece, config: CheckConfig | None = None, samples: int = SWEEP) -> TracedPiece:
    """Follow the zero set of a piece over t in [0, 2pi] and read off its braid."""
    ev = PieceEvaluator(piece)
    keep_zero = piece.role != MIDDLE

    def roots(t):
        r = ev.roots(t)
        if not keep_zero:
            r = r[np.abs(r) > 1e-12]
        return r

    grid = np.linspace(0.0, 2 * np.pi, samples + 1)
    Z0 = roots(0.0)
    M = len(Z0)
    if _min_sep(Z0) < MERGE_TOL:
        raise LinkError("roots merge: not a link (check non-degeneracy)")
    ts, rows = [0.0], [Z0]
    cur, prev_step = Z0, None
    for g in range(1, samples + 1):
        t_target = grid[g]
        t0 = ts[-1]
        while t0 < t_target - 1e-15:
            dt = t_target - t0
            for _ in range(30):
                guess = cur + (prev_step * dt if prev_step is not None else 0)
                c = ev.coeffs(t0 + dt)
                z, ok = ev.newton(c, guess)
                sep = _min_sep(cur)
                if M == 0 or (np.all(ok) and np.max(np.abs(z - cur)) < 0.3 * sep and _min_sep(z) > MERGE_TOL):
                    break
                dt /= 2
            else:
                raise LinkError(f"strand tracking failed near t={t0:.6f}: not a link (check non-degeneracy)")
            if M:
                prev_step = (z - cur) / dt
            cur = z
            t0 = t0 + dt
            ts.append(t0)
            rows.append(cur.copy())
        if g % CHECKPOINT == 0 or g == samples:
            check = roots(t_target)
            if len(check) != M:
                raise LinkError(f"strand count changed from {M} to {len(check)} near t={t_target:.6f}")
            matched, dist = _match(cur, check)
            if dist > 1e-6 * max(1.0, float(np.abs(cur).max(initial=0))):
                raise LinkError("tracked strands drifted from the root set")
            cur = matched
            rows[-1] = cur.copy()
    T = np.array(ts)
    Z = np.array(rows).reshape(len(ts), M)
    if M:
        cost = np.abs(Z[-1][:, None] - Z[0][None, :])
        r, c = linear_sum_assignment(cost)
        if cost[r, c].max() > 1e-6 * max(1.0, float(np.abs(Z[0]).max())):
            raise LinkError("strands do not close up over the circle")
        perm = tuple(int(x) for x in c[np.argsort(r)])
    else:
        perm = ()
    alpha = _generic_alpha(Z[0]) if M else 0.0
    curve = TorusCurve(piece.name, piece.domain, T, Z, M, perm, alpha)
    # tiny generic offsets break symmetric multiple crossings without changing the closed braid
    sep = min(_min_sep(row) for row in Z) if M > 1 else 1.0
    off = (1e-3 * sep) * np.exp(1j * (0.7 + 1.3 * np.arange(M))) * (1 + np.arange(M)) / max(M, 1)
    braid = braid_from_strands(T, Z + off[None, :], alpha)
    comp = []
    for cyc in curve.components():
        sub = Z[:, cyc]
        comp.append(braid_from_strands(T, sub, _generic_alpha(sub[0])).reduced())
    return TracedPiece(piece, curve, braid.reduced(), comp)


# ---------------------------------------------------------------- nested links

@dataclass
class NestedLinkDescriptor:
    inner: list[TracedPiece]          # pieces in C x S^1, innermost first
    outer: TracedPiece | None         # piece in S^1 x C
    diagram: str
    weights: list[tuple[int, int]]
    convention: str = CONVENTION

    @property
    def pieces(self) -> list[TracedPiece]:
        return self.inner + ([self.outer] if self.outer else [])

    @property
    def component_count(self) -> int:
        return sum(len(p.curve.components()) for p in self.pieces)

    def summary(self) -> dict:
        """Comparable description: pieces, braids, components."""
        return {"diagram": self.diagram, "weights": [list(w) for w in self.weights],
                "pieces": [{"name": p.piece.name, "k": str(p.piece.k), "domain": p.curve.domain,
                            "strands": p.curve.strand_count, "closure": list(p.curve.closure_permutation),
                            "braid": p.braid.to_text(),
                            "component_braids": [b.to_text() for b in p.component_braids]}
                           for p in self.pieces],
                "components": self.component_count, "convention": self.convention}

    def as_json(self) -> dict:
        out = self.summary()
        out["detail"] = [p.as_json() for p in self.pieces]
        return out


def nested_link(f: MixedPolynomial, config: CheckConfig | None = None, diagram: CFaceDiagram | None = None,
                samples: int = SWEEP) -> NestedLinkDescriptor:
    """Nested link L([L_1..L_{N-1}], L_N) of an IKND, inner-nice plane mixed polynomial."""
    cfg = config or DEFAULT_CONFIG
    f = f.as_mixed()
    if diagram is None:
        gi = gamma_inn(f, cfg)
        diagram = gi.diagram
    else:
        rep = check_map(f, "IKND", [diagram], cfg)
        if rep.overall == "fail":
            raise PreconditionError("f is not IKND with respect to the given diagram")
    nice = check_nice(f, diagram)
    if not nice.nice:
        v = nice.failures()[0]
        raise LinkError(f"not nice at vertex {tuple(map(str, v.vertex))} ({v.reason}); use make_convenient first")
    P = diagram.principal_weights()
    pieces = boundary_pieces(f, P, diagram)
    if len(pieces) == 1:
        axis_ok = _axis_vertex_knd(f, diagram, 2 if pieces[0].free == 2 else 1, cfg)
        if not axis_ok:
            raise LinkError("single face whose axis vertex is missing or degenerate; use make_convenient first")
    traced = [trace_link_piece(p, cfg, samples) for p in pieces]
    inner = [tp for tp in traced if tp.piece.role != OUTER]
    outer = next((tp for tp in traced if tp.piece.role == OUTER), None)
    return NestedLinkDescriptor(inner, outer, repr(diagram), [tuple(int(x) for x in w) for w in P])


def _axis_vertex_knd(f, D, axis: int, cfg) -> bool:
    pts = [v for v in D.vertices if all(v[k] == 0 for k in range(2) if k != axis - 1)]
    if not pts:
        return False
    v = pts[0]
    M = f.filter(lambda k: tuple(a + b for a, b in zip(*k)) == tuple(v))
    if M.is_zero():
        return False
    return not axis_unit_roots(M, axis)


# ---------------------------------------------------------------- linking numbers

def _component_curve(tp: TracedPiece, cyc: list[int], per_strand: int) -> tuple[np.ndarray, np.ndarray]:
    """Strands of one closure cycle resampled on a uniform t grid and concatenated."""
    T = tp.curve.t
    grid = np.linspace(0, 2 * np.pi, per_strand, endpoint=False)
    segs = []
    for j in cyc:
        Zj = tp.curve.samples[:, j]
        segs.append(np.interp(grid, T, Zj.real) + 1j * np.interp(grid, T, Zj.imag))
    return np.concatenate(segs), np.tile(grid, len(cyc))


def _stereo(P4: np.ndarray) -> np.ndarray:
    pole = np.array([1, 0, 1, 0]) / math.sqrt(2)
    basis = np.linalg.qr(np.column_stack([pole, np.eye(4)[:, :3]]))[0][:, 1:4]
    s = P4 @ pole
    return (P4 - s[:, None] * pole[None, :]) @ basis / (1 - s)[:, None]


def polygon_linking(A: np.ndarray, B: np.ndarray, chunk: int = 512) -> float:
    """Gauss linking number of two closed polygons via exact segment solid angles."""
    a0, a1 = A, np.roll(A, -1, axis=0)
    b0, b1 = B, np.roll(B, -1, axis=0)
    total = 0.0
    for s in range(0, len(A), chunk):
        p1, p2 = a0[s : s + chunk, None, :], a1[s : s + chunk, None, :]
        q1, q2 = b0[None], b1[None]
        r13, r14, r23, r24 = q1 - p1, q2 - p1, q1 - p2, q2 - p2

        def unit(v):
            n = np.linalg.norm(v, axis=-1, keepdims=True)
            return v / np.where(n > 0, n, 1)

        n1 = unit(np.cross(r13, r14))
        n2 = unit(np.cross(r14, r24))
        n3 = unit(np.cross(r24, r23))
        n4 = unit(np.cross(r23, r13))
        dots = [np.clip((x * y).sum(-1), -1, 1) for x, y in ((n1, n2), (n2, n3), (n3, n4), (n4, n1))]
        om = sum(np.arcsin(d) for d in dots)
        sign = np.sign((np.cross(q2 - q1, p2 - p1) * r13).sum(-1))
        total += float((om * sign).sum())
    return total / (4 * math.pi)


def link_invariants(desc: NestedLinkDescriptor, epsilon_scale: float = 0.1, per_strand: int = 1024) -> dict:
    """Component count, linking matrix and braids of the nested link embedded in S^3."""
    if per_strand < 1024:
        raise LinkError("need at least 1024 samples per strand")
    eps = float(epsilon_scale)
    # radial placement: inner pieces in disjoint annuli inside |x1| <= eps, innermost first
    inner = desc.inner
    scales = [1.0] * len(inner)
    upper = eps
    for i in range(len(inner) - 1, -1, -1):
        Z = np.abs(inner[i].curve.samples)
        rmax = float(Z.max(initial=0.0))
        nz = Z[Z > 1e-12]
        scales[i] = upper / rmax if rmax > 0 else 1.0
        upper = 0.5 * scales[i] * float(nz.min()) if nz.size else upper
    curves, labels = [], []
    for i, tp in enumerate(inner):
        for c, cyc in enumerate(tp.curve.components()):
            z, t = _component_curve(tp, cyc, per_strand)
            x1 = scales[i] * z
            x2 = np.sqrt(np.maximum(1 - np.abs(x1) ** 2, 0)) * np.exp(1j * t)
            curves.append(np.column_stack([x1.real, x1.imag, x2.real, x2.imag]))
            labels.append(f"{tp.piece.name}:{c}")
    if desc.outer is not None:
        tp = desc.outer
        rmax = float(np.abs(tp.curve.samples).max(initial=0.0))
        s = eps / rmax if rmax > 0 else 1.0
        for c, cyc in enumerate(tp.curve.components()):
            z, t = _component_curve(tp, cyc, per_strand)
            x2 = s * z
            x1 = np.sqrt(np.maximum(1 - np.abs(x2) ** 2, 0)) * np.exp(1j * t)
            curves.append(np.column_stack([x1.real, x1.imag, x2.real, x2.imag]))
            labels.append(f"{tp.piece.name}:{c}")
    R3 = [_stereo(c) for c in curves]
    n = len(R3)
    L = [[0] * n for _ in range(n)]
    raw = [[0.0] * n for _ in range(n)]
    resid = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            v = polygon_linking(R3[a], R3[b])
            raw[a][b] = raw[b][a] = v
            L[a][b] = L[b][a] = int(round(v))
            resid = max(resid, abs(v - round(v)))
    return {"components": n, "labels": labels, "linking_matrix": L, "raw": raw, "residual": resid,
            "undersampled": resid >= 0.1, "epsilon_scale": eps, "per_strand": per_strand,
            "braids": [p.braid.to_text() for p in desc.pieces],
            "component_braids": [[b.to_text() for b in p.component_braids] for p in desc.pieces],
            "convention": desc.convention}


# ---------------------------------------------------------------- convenient pipeline

@dataclass
class PipelineStep:
    label: str
    polynomial: MixedPolynomial
    certificate: dict

    def as_json(self) -> dict:
        return {"label": self.label, "polynomial": self.polynomial.to_text(), "certificate": self.certificate}


def axis_polynomial(M: MixedPolynomial, axis: int) -> list[ExactComplex]:
    """Coefficients c_0..c_a of P(z) with M = conj(x)^a P(x / conj(x)) for an axis monomial block."""
    pts = support(M)
    (pt,) = pts
    a = pt[axis - 1]
    c = [ExactComplex(0)] * (a + 1)
    for (nu, mu), v in M.items():
        c[nu[axis - 1]] = c[nu[axis - 1]] + v
    return c


def _numeric_roots(c: list[ExactComplex]) -> np.ndarray:
    arr = np.array([complex(x) for x in c], dtype=complex)
    nz = np.nonzero(np.abs(arr) > 0)[0]
    if not nz.size:
        return np.zeros(0, dtype=complex)
    arr = arr[: nz.max() + 1]
    return np.roots(arr[::-1]) if len(arr) > 1 else np.zeros(0, dtype=complex)


def axis_unit_roots(M: MixedPolynomial, axis: int, tol: float = 1e-9) -> list[complex]:
    return [complex(z) for z in _numeric_roots(axis_polynomial(M, axis)) if abs(abs(z) - 1) < tol]


def _poly_gcd_degree(c: list[ExactComplex]) -> int:
    """Degree of gcd(P, P') over the Gaussian rationals; zero means square-free."""
    def trim(p):
        p = list(p)
        while p and not p[-1]:
            p.pop()
        return p

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b) and a:
            q = a[-1] / b[-1]
            sh = len(a) - len(b)
            for i, bi in enumerate(b):
                a[sh + i] = a[sh + i] - q * bi
            a = trim(a)
        return a

    P = trim(c)
    dP = trim([P[i] * ExactComplex(i) for i in range(1, len(P))])
    a, b = P, dP
    while b:
        a, b = b, rem(a, b)
    return len(a) - 1


def squarefree(c: list[ExactComplex]) -> bool:
    return _poly_gcd_degree(c) == 0


def _certify(cur: MixedPolynomial, theta: MixedPolynomial, cfg, strict_needed: bool) -> dict:
    """Inner-diagram criterion for F = cur + eps*theta: cur IKND and theta above its inner diagram."""
    gi = gamma_inn(cur, cfg)
    fam = DeformationFamily(_map(cur), ({1: theta},))
    ok, margins = theta_degree_ok(fam, [gi.diagram], strict=False)
    strict, _ = theta_degree_ok(fam, [gi.diagram], strict=True)
    ikd = _report_status(gi.report)
    if not ok or ikd == "fail" or (strict_needed and not strict):
        raise LinkError(f"step certification failure: degree ok={ok}, strict={strict}, IKND={ikd}")
    return {"theorem": "inner-diagram", "diagram": repr(gi.diagram), "ikdn": ikd, "strict": strict,
            "scope": "global" if strict else "neighborhood", "margins": [m.as_json() for m in margins]}


def _map(f):
    return PolynomialMap.of(f)


def _axis_point(D, axis: int):
    return next(v for v in D.vertices if all(v[k] == 0 for k in range(2) if k != axis - 1))


def make_convenient(f: MixedPolynomial, config: CheckConfig | None = None, max_steps: int = 8) -> list[PipelineStep]:
    """Link-constant chain from an IKND plane mixed polynomial to a convenient KND one."""
    cfg = config or DEFAULT_CONFIG
    cur = f.as_mixed()
    gi = gamma_inn(cur, cfg)
    steps = [PipelineStep("input", cur, {"diagram": repr(gi.diagram), "ikdn": _report_status(gi.report)})]
    D0 = gi.diagram
    m = int(math.floor(max(_axis_point(D0, a)[a - 1] for a in (1, 2)))) + 1
    for axis in (1, 2):
        D = gamma_inn(cur, cfg).diagram
        v = _axis_point(D, axis)
        M = cur.filter(lambda k, v=v: tuple(a + b for a, b in zip(*k)) == tuple(v))
        if M.is_zero():
            if any(all(x == 0 for k, x in enumerate(pt) if k != axis - 1) for pt in support(cur)):
                continue        # already convenient on this axis
            e = m
            while True:
                nu = [0, 0]
                nu[axis - 1] = e
                theta = MixedPolynomial.monomial(nu)
                try:
                    cert = _certify(cur, theta, cfg, strict_needed=True)
                    break
                except LinkError:
                    e += 1
                    if e > m + DEGREE_CAP:
                        raise
            cur = cur + theta
            steps.append(PipelineStep(f"add interior monomial x{axis}^{e}", cur, cert))
            continue
        c = axis_polynomial(M, axis)
        if not axis_unit_roots(M, axis):
            continue
        a = len(c) - 1
        if not squarefree(c):
            theta = _axis_monomial(axis, 0, a)      # conj(x)^a shifts P by a constant
            for k in range(1, 13):
                delta = Fraction(1, 10 ** k)
                if squarefree([c[0] + ExactComplex(delta)] + c[1:]):
                    break
            else:
                raise LinkError("could not split multiple unit roots")
            th = theta * MixedPolynomial.constant(2, ExactComplex(delta))
            cert = _certify(cur, th, cfg, strict_needed=False)
            cur = cur + th
            M = M + th
            c = axis_polynomial(M, axis)
            steps.append(PipelineStep(f"split multiple roots on axis {axis} (delta={delta})", cur, cert))
        theta = MixedPolynomial.zero(2)
        for i, ci in enumerate(c):
            if i and ci:
                theta = theta + _axis_monomial(axis, i, a - i) * MixedPolynomial.constant(2, ci * ExactComplex(i))
        for k in range(1, 13):
            eps = Fraction(1, 10 ** k)
            th = theta * MixedPolynomial.constant(2, ExactComplex(eps))
            if not axis_unit_roots(M + th, axis, tol=1e-6):
                break
        else:
            raise LinkError("derivative perturbation did not clear the unit circle")
        cert = _certify(cur, th, cfg, strict_needed=False)
        cert["eps"] = str(eps)
        cur = cur + th
        steps.append(PipelineStep(f"move axis-{axis} unit roots off the circle (eps={eps})", cur, cert))
        if len(steps) > max_steps:
            raise LinkError("pipeline did not terminate")
    conv = newton_boundary_of(cur).convenient
    knd = check_map(cur, "KND", None, cfg)
    steps[-1].certificate = dict(steps[-1].certificate, final_convenient=conv, final_knd=knd.overall)
    if not conv or knd.overall == "fail":
        raise LinkError(f"final polynomial convenient={conv}, KND={knd.overall}")
    return steps


def _axis_monomial(axis: int, i: int, j: int) -> MixedPolynomial:
    nu, mu = [0, 0], [0, 0]
    nu[axis - 1], mu[axis - 1] = i, j
    return MixedPolynomial.monomial(nu, mu)
