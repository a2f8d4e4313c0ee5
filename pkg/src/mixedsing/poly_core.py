"""Exact real and mixed polynomials: parsing, supports, Wirtinger calculus,
face restriction, realification and the polar form of two-variable vertex
polynomials.

Coefficients are Gaussian rationals held as pairs of ``Fraction``.  A mixed
term ``c * x^nu * conj(x)^mu`` is keyed by ``(nu, mu)``; real polynomials
simply have ``mu == 0`` everywhere and real coefficients.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

REAL = "real"
MIXED = "mixed"
MAX_VARS = 8

Exponent = tuple[int, ...]
Key = tuple[Exponent, Exponent]


class ParseError(ValueError):
    """Raised for malformed polynomial text; ``pos`` is the 0-based offset."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, slots=True)
class ExactComplex:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @classmethod
    def of(cls, value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return cls(as_fraction(value.real), as_fraction(value.imag))
        return cls(as_fraction(value), Fraction(0))

    def __add__(self, other):
        other = ExactComplex.of(other)
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-ExactComplex.of(other))

    def __rsub__(self, other):
        return ExactComplex.of(other) - self

    def __mul__(self, other):
        o = ExactComplex.of(other)
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ExactComplex.of(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return ExactComplex(num.re / den, num.im / den)

    def __pow__(self, k: int):
        out = ExactComplex(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_text(self) -> str:
        """Coefficient in the input grammar (rational, ``i`` or ``(re,im)``)."""
        if self.im == 0:
            return fmt_rational(self.re)
        if self.re == 0 and self.im == 1:
            return "i"
        return f"({fmt_rational(self.re)},{fmt_rational(self.im)})"

    def __repr__(self):
        return f"ExactComplex({self.to_text()})"


ZERO = ExactComplex(0)
ONE = ExactComplex(1)
I_UNIT = ExactComplex(0, 1)


@dataclass(frozen=True, slots=True)
class MixedTerm:
    coeff: ExactComplex
    nu: Exponent
    mu: Exponent

    @property
    def point(self) -> Exponent:
        return tuple(a + b for a, b in zip(self.nu, self.mu))


class MixedPolynomial:
    """Immutable polynomial in ``x_1..x_n`` and their conjugates.

    ``kind == REAL`` means no conjugate variables and real coefficients; such
    a polynomial is evaluated over real points.  Constant terms are allowed
    here (derivatives need them); the ``f(0) = 0`` input condition is enforced
    by :func:`parse_mixed` and :class:`PolynomialMap`.
    """

    __slots__ = ("n", "kind", "_terms", "__dict__")

    def __init__(self, n: int, terms: Mapping[Key, ExactComplex] | Iterable[tuple[Key, ExactComplex]] = (), kind: str = MIXED):
        if not 1 <= n <= MAX_VARS:
            raise ValueError(f"variable count {n} outside 1..{MAX_VARS}")
        if kind not in (REAL, MIXED):
            raise ValueError(f"unknown kind {kind!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, ExactComplex] = {}
        for (nu, mu), c in items:
            nu, mu = tuple(int(a) for a in nu), tuple(int(a) for a in mu)
            if len(nu) != n or len(mu) != n or min(nu + mu, default=0) < 0:
                raise ValueError(f"bad exponent pair {(nu, mu)} for n={n}")
            acc[(nu, mu)] = acc.get((nu, mu), ZERO) + ExactComplex.of(c)
        clean = {k: v for k, v in sorted(acc.items()) if v}
        if kind == REAL:
            for (nu, mu), c in clean.items():
                if any(mu) or not c.is_real:
                    raise ValueError("real polynomial with conjugate variable or complex coefficient")
        self.n = n
        self.kind = kind
        self._terms = clean

    # construction helpers
    @classmethod
    def zero(cls, n: int, kind: str = MIXED) -> "MixedPolynomial":
        return cls(n, {}, kind)

    @classmethod
    def constant(cls, n: int, c, kind: str = MIXED) -> "MixedPolynomial":
        z = (0,) * n
        return cls(n, {(z, z): ExactComplex.of(c)}, kind)

    @classmethod
    def variable(cls, n: int, i: int, conjugate: bool = False, kind: str = MIXED) -> "MixedPolynomial":
        e = tuple(1 if k == i - 1 else 0 for k in range(n))
        z = (0,) * n
        key = (z, e) if conjugate else (e, z)
        return cls(n, {key: ONE}, kind)

    @classmethod
    def monomial(cls, nu: Sequence[int], mu: Sequence[int] | None = None, coeff=1, kind: str = MIXED) -> "MixedPolynomial":
        mu = tuple(mu) if mu is not None else (0,) * len(nu)
        return cls(len(nu), {(tuple(nu), mu): ExactComplex.of(coeff)}, kind)

    # container protocol
    @property
    def terms(self) -> tuple[MixedTerm, ...]:
        return tuple(MixedTerm(c, nu, mu) for (nu, mu), c in self._terms.items())

    def items(self) -> Iterator[tuple[Key, ExactComplex]]:
        return iter(self._terms.items())

    def coeff(self, nu: Sequence[int], mu: Sequence[int] | None = None) -> ExactComplex:
        mu = tuple(mu) if mu is not None else (0,) * self.n
        return self._terms.get((tuple(nu), mu), ZERO)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def has_constant(self) -> bool:
        z = (0,) * self.n
        return (z, z) in self._terms

    def __eq__(self, other):
        if not isinstance(other, MixedPolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    # arithmetic
    def _join_kind(self, other: "MixedPolynomial") -> str:
        if self.n != other.n:
            raise ValueError("variable count mismatch")
        return REAL if self.kind == other.kind == REAL else MIXED

    def _lift(self, other) -> "MixedPolynomial":
        if isinstance(other, MixedPolynomial):
            return other
        c = ExactComplex.of(other)
        return MixedPolynomial.constant(self.n, c, REAL if (self.kind == REAL and c.is_real) else MIXED)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, ZERO) + c
        return MixedPolynomial(self.n, acc, self._join_kind(other))

    __radd__ = __add__

    def __neg__(self):
        return MixedPolynomial(self.n, {k: -c for k, c in self._terms.items()}, self.kind)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        kind = self._join_kind(other)
        acc: dict[Key, ExactComplex] = {}
        for (n1, m1), c1 in self._terms.items():
            for (n2, m2), c2 in other._terms.items():
                key = (tuple(a + b for a, b in zip(n1, n2)), tuple(a + b for a, b in zip(m1, m2)))
                acc[key] = acc.get(key, ZERO) + c1 * c2
        return MixedPolynomial(self.n, acc, kind)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = MixedPolynomial.constant(self.n, 1, self.kind)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "MixedPolynomial":
        """Complex conjugate as a function: swaps nu and mu, conjugates coefficients."""
        return MixedPolynomial(self.n, {(mu, nu): c.conjugate() for (nu, mu), c in self._terms.items()}, self.kind)

    def as_mixed(self) -> "MixedPolynomial":
        return self if self.kind == MIXED else MixedPolynomial(self.n, self._terms, MIXED)

    def filter(self, keep) -> "MixedPolynomial":
        return MixedPolynomial(self.n, {k: c for k, c in self._terms.items() if keep(k)}, self.kind)

    def restrict_zero(self, zero_vars: Iterable[int]) -> "MixedPolynomial":
        """Set the (1-based) variables in ``zero_vars`` to zero."""
        idx = [i - 1 for i in zero_vars]
        return self.filter(lambda k: all(k[0][i] == 0 and k[1][i] == 0 for i in idx))

    @property
    def is_holomorphic(self) -> bool:
        return all(not any(mu) for (_, mu) in self._terms)

    @property
    def is_exact_real_coeffs(self) -> bool:
        return all(c.is_real for c in self._terms.values())

    # rendering
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (nu, mu), c in self._terms.items():
            factors = []
            for i, (a, b) in enumerate(zip(nu, mu), start=1):
                if a:
                    factors.append(f"x{i}" + (f"^{a}" if a > 1 else ""))
                if b:
                    factors.append(f"~x{i}" + (f"^{b}" if b > 1 else ""))
            sign = "+"
            if c.im == 0 and c.re < 0:
                sign, c = "-", -c
            ctext = c.to_text()
            if factors:
                body = "*".join(factors) if ctext == "1" else "*".join([ctext] + factors)
            else:
                body = ctext
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MixedPolynomial(n={self.n}, kind={self.kind}, {self.to_text()!r})"

    # numerics
    @cached_property
    def _compiled(self):
        keys = list(self._terms)
        coef = np.array([complex(self._terms[k]) for k in keys], dtype=complex)
        nu = np.array([k[0] for k in keys], dtype=np.int64).reshape(len(keys), self.n)
        mu = np.array([k[1] for k in keys], dtype=np.int64).reshape(len(keys), self.n)
        return coef, nu, mu

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an ``(N, n)`` array of points; returns shape ``(N,)``."""
        pts = np.asarray(points)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        real_pts = not np.iscomplexobj(pts) or not np.any(pts.imag)
        pts = pts.real.astype(float) if real_pts else pts.astype(complex)
        coef, nu, mu = self._compiled
        if not len(coef):
            out = np.zeros(pts.shape[0], dtype=complex)
        else:
            # power tables by cumulative product; at real points x and conj(x) coincide
            top = int(max(nu.max(), mu.max()))
            tab = np.ones((pts.shape[0], self.n, top + 1), dtype=pts.dtype)
            if top:
                tab[:, :, 1:] = np.cumprod(np.repeat(pts[:, :, None], top, axis=2), axis=2)
            cols = np.arange(self.n)
            mono = np.prod(tab[:, cols, nu], axis=2)
            if mu.any():
                mono = mono * np.prod((tab if real_pts else tab.conj())[:, cols, mu], axis=2)
            out = mono @ coef
        if self.kind == REAL and real_pts:
            out = out.real.astype(float)
        return out[0] if single else out
        return out[0] if single else out


def _key_degree(key: Key, w: Sequence[Fraction]) -> Fraction:
    nu, mu = key
    return sum((wi * (a + b) for wi, a, b in zip(w, nu, mu)), Fraction(0))


@dataclass(frozen=True)
class PolynomialMap:
    components: tuple[MixedPolynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a map needs at least one component")
        if len({c.n for c in comps}) != 1:
            raise ValueError("components must share the variable count")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *comps: MixedPolynomial) -> "PolynomialMap":
        return cls(tuple(comps))

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def kind(self) -> str:
        return REAL if all(c.kind == REAL for c in self.components) else MIXED

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, j):
        return self.components[j]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>~?x\d+)|(?P<i>i)|(?P<op>[-+*^/(),]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: int, kind: str):
        if any(ord(ch) > 127 for ch in text):
            pos = next(k for k, ch in enumerate(text) if ord(ch) > 127)
            raise ParseError("non-ASCII input", pos)
        self.toks = _tokenize(text)
        self.k = 0
        self.n = n
        self.kind = kind

    def peek(self, off: int = 0):
        return self.toks[min(self.k + off, len(self.toks) - 1)]

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            raise ParseError(f"expected {value or kind}, got {tok[1] or 'end of input'!r}", tok[2])
        self.k += 1
        return tok

    def expr(self) -> MixedPolynomial:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> MixedPolynomial:
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take("*")
            acc = acc * self.factor()
        return acc

    def factor(self) -> MixedPolynomial:
        base = self.atom()
        while self.peek()[1] == "^":
            self.take("^")
            base = base ** int(self.take(kind="num")[1])
        return base

    def _const(self, c: ExactComplex) -> MixedPolynomial:
        return MixedPolynomial.constant(self.n, c, MIXED)

    def _rational(self) -> Fraction:
        neg = False
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            neg = self.take()[1] == "-"
        num = Fraction(int(self.take(kind="num")[1]))
        if self.peek()[1] == "/":
            self.take("/")
            den = int(self.take(kind="num")[1])
            if den == 0:
                raise ParseError("zero denominator", self.peek(-1)[2])
            num /= den
        return -num if neg else num

    def _looks_like_pair(self) -> bool:
        # '(' rat ',' rat ')' with rat := [sign] int ['/' uint]
        j = self.k + 1
        for part in range(2):
            if self.toks[j][1] in "+-" and self.toks[j][0] == "op":
                j += 1
            if self.toks[j][0] != "num":
                return False
            j += 1
            if self.toks[j][1] == "/":
                j += 2
            want = "," if part == 0 else ")"
            if self.toks[j][1] != want:
                return False
            j += 1
        return True

    def atom(self) -> MixedPolynomial:
        kind, val, pos = self.peek()
        if kind == "num":
            return self._const(ExactComplex(self._rational()))
        if kind == "i":
            self.take()
            return self._const(I_UNIT)
        if kind == "var":
            self.take()
            conj = val.startswith("~")
            idx = int(val.lstrip("~x"))
            if not 1 <= idx <= self.n:
                raise ParseError(f"variable index {idx} outside 1..{self.n}", pos)
            if conj and self.kind == REAL:
                raise ParseError("conjugate variable in a real polynomial", pos)
            return MixedPolynomial.variable(self.n, idx, conj)
        if val == "(":
            if self._looks_like_pair():
                self.take("(")
                re_ = self._rational()
                self.take(",")
                im_ = self._rational()
                self.take(")")
                return self._const(ExactComplex(re_, im_))
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse_mixed(text: str, n: int, kind: str = MIXED) -> MixedPolynomial:
    """Parse ``text`` in the polynomial grammar and expand to normal form."""
    p = _Parser(text, n, kind)
    poly = p.expr()
    p.take(kind="end")
    if poly.has_constant:
        raise ParseError("constant term present (f(0) must vanish)", 0)
    if kind == REAL:
        if not poly.is_exact_real_coeffs:
            raise ParseError("complex coefficient in a real polynomial", 0)
        return MixedPolynomial(n, poly._terms, REAL)
    return poly


# ---------------------------------------------------------------- supports and degrees

def support(f: MixedPolynomial, view: str = MIXED) -> frozenset[Exponent]:
    """Lattice support; the real view uses the realified components."""
    if view == MIXED or f.kind == REAL:
        return frozenset(tuple(a + b for a, b in zip(nu, mu)) for (nu, mu) in f._terms)
    real = realify(PolynomialMap.of(f))
    pts: set[Exponent] = set()
    for comp in real:
        pts |= {nu for (nu, _) in comp._terms}
    return frozenset(pts)


def min_degree(f: MixedPolynomial, w: Sequence) -> Fraction | float:
    """d(w; f): minimum of <w, nu+mu> over the support, ``inf`` for f = 0."""
    w = [as_fraction(x) for x in w]
    if f.is_zero():
        return math.inf
    return min(_key_degree(k, w) for k in f._terms)


def face_terms(f: MixedPolynomial, w: Sequence, level) -> MixedPolynomial:
    w = [as_fraction(x) for x in w]
    level = as_fraction(level)
    return f.filter(lambda k: _key_degree(k, w) == level)


def initial_form(f: MixedPolynomial, w: Sequence) -> MixedPolynomial:
    """Lowest w-degree part f_w."""
    d = min_degree(f, w)
    return f if d == math.inf else face_terms(f, w, d)


def radial_weight_check(f: MixedPolynomial, w: Sequence) -> Fraction | None:
    """Common degree if every term has the same <w, nu+mu>; ``None`` otherwise."""
    w = [as_fraction(x) for x in w]
    degs = {_key_degree(k, w) for k in f._terms}
    return degs.pop() if len(degs) == 1 else None


# ---------------------------------------------------------------- calculus

def wirtinger(f: MixedPolynomial, i: int, conjugate: bool = False) -> MixedPolynomial:
    """Formal d/dx_i (or d/d conj(x_i)); for real kind this is the real partial."""
    if not 1 <= i <= f.n:
        raise ValueError(f"variable index {i} outside 1..{f.n}")
    j = i - 1
    acc: dict[Key, ExactComplex] = {}
    for (nu, mu), c in f._terms.items():
        e = mu if conjugate else nu
        if e[j] == 0:
            continue
        new = tuple(a - (1 if k == j else 0) for k, a in enumerate(e))
        key = (nu, new) if conjugate else (new, mu)
        acc[key] = acc.get(key, ZERO) + c * e[j]
    return MixedPolynomial(f.n, acc, f.kind)


def substitute(f: MixedPolynomial, images: Sequence[MixedPolynomial], conj_images: Sequence[MixedPolynomial] | None = None) -> MixedPolynomial:
    """Replace x_k by images[k] and conj(x_k) by conj_images[k] (default: conjugate of the image)."""
    if len(images) != f.n:
        raise ValueError("need one image per variable")
    if conj_images is None:
        conj_images = [g.conjugate() for g in images]
    m = images[0].n
    kind = REAL if f.kind == REAL and all(g.kind == REAL for g in images) else MIXED
    out = MixedPolynomial.zero(m, kind)
    pow_cache: dict[tuple[int, int, bool], MixedPolynomial] = {}

    def power(k: int, e: int, conj: bool) -> MixedPolynomial:
        key = (k, e, conj)
        if key not in pow_cache:
            pow_cache[key] = (conj_images[k] if conj else images[k]) ** e
        return pow_cache[key]

    for (nu, mu), c in f._terms.items():
        t = MixedPolynomial.constant(m, c, MIXED)
        for k in range(f.n):
            if nu[k]:
                t = t * power(k, nu[k], False)
            if mu[k]:
                t = t * power(k, mu[k], True)
        out = out + t
    return out


def _check_perm(perm: Sequence[int], size: int, what: str) -> tuple[int, ...]:
    perm = tuple(int(s) for s in perm)
    if sorted(perm) != list(range(1, size + 1)):
        raise ValueError(f"{what} must be a permutation of 1..{size}, got {perm}")
    return perm


def realify(fmap: PolynomialMap | MixedPolynomial, sigma: Sequence[int] | None = None, varsigma: Sequence[int] | None = None) -> PolynomialMap:
    """Real map in 2n variables with 2p components.

    Uses x_i = X[sigma(2i-1)] + i*X[sigma(2i)] and stores Re f^j, Im f^j as
    components varsigma(2j-1), varsigma(2j) (all indices 1-based).
    """
    if isinstance(fmap, MixedPolynomial):
        fmap = PolynomialMap.of(fmap)
    n, p = fmap.n, fmap.p
    sigma = _check_perm(sigma or range(1, 2 * n + 1), 2 * n, "sigma")
    varsigma = _check_perm(varsigma or range(1, 2 * p + 1), 2 * p, "varsigma")
    m = 2 * n
    images = [
        MixedPolynomial.variable(m, sigma[2 * i], kind=REAL)
        + MixedPolynomial.variable(m, sigma[2 * i + 1], kind=REAL) * I_UNIT
        for i in range(n)
    ]
    conj_images = [
        MixedPolynomial.variable(m, sigma[2 * i], kind=REAL)
        - MixedPolynomial.variable(m, sigma[2 * i + 1], kind=REAL) * I_UNIT
        for i in range(n)
    ]
    comps: list[MixedPolynomial | None] = [None] * (2 * p)
    for j, f in enumerate(fmap):
        g = substitute(f, images, conj_images)
        re_part = {k: ExactComplex(c.re) for k, c in g.items()}
        im_part = {k: ExactComplex(c.im) for k, c in g.items()}
        comps[varsigma[2 * j] - 1] = MixedPolynomial(m, re_part, REAL)
        comps[varsigma[2 * j + 1] - 1] = MixedPolynomial(m, im_part, REAL)
    return PolynomialMap(tuple(comps))


def reconstruct_mixed(rmap: PolynomialMap, sigma: Sequence[int] | None = None, varsigma: Sequence[int] | None = None) -> PolynomialMap:
    """Inverse of :func:`realify`: f^j = F[varsigma(2j-1)] + i*F[varsigma(2j)] in x, conj(x)."""
    m, q = rmap.n, rmap.p
    if m % 2 or q % 2:
        raise ValueError("real map needs an even number of variables and components")
    n, p = m // 2, q // 2
    sigma = _check_perm(sigma or range(1, m + 1), m, "sigma")
    varsigma = _check_perm(varsigma or range(1, q + 1), q, "varsigma")
    half = ExactComplex(Fraction(1, 2))
    images: list[MixedPolynomial | None] = [None] * m
    for i in range(n):
        x = MixedPolynomial.variable(n, i + 1)
        xb = MixedPolynomial.variable(n, i + 1, conjugate=True)
        images[sigma[2 * i] - 1] = (x + xb) * half
        images[sigma[2 * i + 1] - 1] = (x - xb) * ExactComplex(0, Fraction(-1, 2))
    comps = []
    for j in range(p):
        re_ = substitute(rmap[varsigma[2 * j] - 1], images, images)
        im_ = substitute(rmap[varsigma[2 * j + 1] - 1], images, images)
        comps.append((re_ + im_ * I_UNIT).as_mixed())
    return PolynomialMap(tuple(comps))


def permutation_pairs(n: int, p: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for s in permutations(range(1, 2 * n + 1)):
        for t in permutations(range(1, 2 * p + 1)):
            yield s, t


# ---------------------------------------------------------------- polar vertex form

@dataclass(frozen=True)
class PolarVertexForm:
    """M(x1, r e^{it}) = conj(x1)^a r^b sum_i c_i(t) (x1/conj(x1))^i  (axis 2).

    ``coeffs[i]`` maps a frequency k to the exact coefficient of e^{ikt}.
    With axis 1 the roles of the variables are swapped.
    """

    a: int
    b: int
    axis: int
    coeffs: tuple[dict[int, ExactComplex], ...]

    def coefficient_values(self, t: np.ndarray) -> np.ndarray:
        """c_i(t) as an array of shape (len(t), a+1)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, len(self.coeffs)), dtype=complex)
        for i, laurent in enumerate(self.coeffs):
            for k, c in laurent.items():
                out[:, i] += complex(c) * np.exp(1j * k * t)
        return out

    def coefficient_derivatives(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, len(self.coeffs)), dtype=complex)
        for i, laurent in enumerate(self.coeffs):
            for k, c in laurent.items():
                out[:, i] += 1j * k * complex(c) * np.exp(1j * k * t)
        return out

    @property
    def t_independent(self) -> bool:
        return all(set(l) <= {0} for l in self.coeffs)

    def degree(self) -> int:
        nz = [i for i, l in enumerate(self.coeffs) if l]
        return max(nz) if nz else -1

    def to_polynomial(self) -> MixedPolynomial:
        """Rebuild M from the form (exact round trip)."""
        free, polar = (1, 2) if self.axis == 2 else (2, 1)
        terms: dict[Key, ExactComplex] = {}
        for i, laurent in enumerate(self.coeffs):
            for k, c in laurent.items():
                # r^b e^{ikt} = x^nu conj(x)^mu with nu+mu=b, nu-mu=k
                nu2, mu2 = (self.b + k) // 2, (self.b - k) // 2
                nu, mu = [0, 0], [0, 0]
                nu[free - 1], mu[free - 1] = i, self.a - i
                nu[polar - 1], mu[polar - 1] = nu2, mu2
                terms[(tuple(nu), tuple(mu))] = c
        return MixedPolynomial(2, terms, MIXED)


def vertex_polar_form(M: MixedPolynomial, axis: int = 2) -> PolarVertexForm:
    if M.n != 2:
        raise ValueError("polar vertex form needs two variables")
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    pts = support(M, MIXED)
    if len(pts) != 1:
        raise ValueError(f"expected a single mixed-support point, got {sorted(pts)}")
    (pt,) = pts
    free, polar = (0, 1) if axis == 2 else (1, 0)
    a, b = pt[free], pt[polar]
    coeffs: list[dict[int, ExactComplex]] = [dict() for _ in range(a + 1)]
    for (nu, mu), c in M.items():
        k = nu[polar] - mu[polar]
        slot = coeffs[nu[free]]
        slot[k] = slot.get(k, ZERO) + c
    coeffs = [{k: v for k, v in sorted(l.items()) if v} for l in coeffs]
    return PolarVertexForm(a if axis == 2 else pt[1], b if axis == 2 else pt[0], axis, tuple(coeffs))


# ---------------------------------------------------------------- critical-point residual

class NumericMap:
    """Compiled numeric view of a map with its first derivatives."""

    def __init__(self, fmap: PolynomialMap):
        self.map = fmap
        self.n, self.p, self.kind = fmap.n, fmap.p, fmap.kind
        self.d = [[wirtinger(f, i) for i in range(1, self.n + 1)] for f in fmap]
        self.dbar = [[wirtinger(f, i, True) for i in range(1, self.n + 1)] for f in fmap] if self.kind == MIXED else None

    def values(self, X: np.ndarray) -> np.ndarray:
        return np.stack([f.evaluate_batch(X) for f in self.map], axis=1)

    def _grad(self, polys, X):
        return np.stack([np.stack([g.evaluate_batch(X) for g in row], axis=1) for row in polys], axis=1)

    def real_jacobian(self, X: np.ndarray) -> np.ndarray:
        """Real Jacobian per point: (N, p, n) for real maps, (N, 2p, 2n) for mixed."""
        X = np.atleast_2d(X)
        if self.kind == REAL:
            return np.real(self._grad(self.d, X))
        D = self._grad(self.d, X)
        Db = self._grad(self.dbar, X)
        du = D + Db            # d/du_k of f^j (complex)
        dv = 1j * (D - Db)     # d/dv_k of f^j
        N = X.shape[0]
        J = np.empty((N, 2 * self.p, 2 * self.n))
        J[:, 0::2, 0::2], J[:, 0::2, 1::2] = du.real, dv.real
        J[:, 1::2, 0::2], J[:, 1::2, 1::2] = du.imag, dv.imag
        return J

    def residual_closed_form(self, X: np.ndarray) -> np.ndarray:
        """min over |lambda|=1 of (sum_i |conj(df/dx_i) - lambda df/dconj(x_i)|^2)^(1/2), p = 1."""
        X = np.atleast_2d(X)
        a = np.conj(self._grad(self.d, X)[:, 0, :])
        b = self._grad(self.dbar, X)[:, 0, :]
        sq = (np.abs(a) ** 2).sum(1) + (np.abs(b) ** 2).sum(1) - 2 * np.abs((a * np.conj(b)).sum(1))
        return np.sqrt(np.maximum(sq, 0.0))

    def residual_svd(self, X: np.ndarray) -> np.ndarray:
        J = self.real_jacobian(X)
        rows, cols = J.shape[1:]
        if rows > cols:
            return np.zeros(J.shape[0])
        return np.linalg.svd(J, compute_uv=False)[:, -1]

    def residual(self, X: np.ndarray) -> np.ndarray:
        if self.kind == MIXED and self.p == 1:
            return self.residual_closed_form(X)
        return self.residual_svd(X)


def oka_residual(fmap: PolynomialMap | MixedPolynomial, point) -> float:
    """Distance-to-critical measure: zero exactly on the critical set."""
    if isinstance(fmap, MixedPolynomial):
        fmap = PolynomialMap.of(fmap)
    return float(NumericMap(fmap).residual(np.asarray(point)[None, :])[0])
