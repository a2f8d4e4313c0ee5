import numpy as np
import pytest
from hypothesis import strategies as st

from mixedsing.poly_core import MIXED, REAL, ExactComplex, MixedPolynomial, parse_mixed

SIKND_ONLY = "x1^12+x1*x2^4*x3+(x2^3-x3^2)^2"
TREFOIL = "x1^6+~x2*x1^4+x1*~x2^3+x2^6"
TREFOIL_FACE = "~x2*x1^4+x1*~x2^3"
NOT_NICE = "x1^3+x2*x1+(x2+1/2*~x2)*~x1+x2^2"
NOT_NICE_22 = "x1^4+(x2^2-~x2^2)*x1*~x1+(i+1)*x2*~x2*(x1^2+~x1^2)+x2^6"
PRODUCT = "(x1^6+x1*x2^5+x2*x3^6)*(x1^2+x2^2+x3^2)"


def P(text, n, kind=MIXED):
    return parse_mixed(text, n, kind)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


small_rat = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda q: q != 0)


@st.composite
def mixed_polys(draw, n=2, max_terms=6, max_exp=6, holomorphic=False):
    """Random mixed polynomial without constant term."""
    k = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(k):
        nu = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        mu = (0,) * n if holomorphic else tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        if sum(nu) + sum(mu) == 0 or sum(nu) + sum(mu) > max_exp:
            continue
        terms[(nu, mu)] = ExactComplex(draw(small_rat), draw(st.sampled_from([0, 0, 1, -1])))
    if not terms:
        e = [0] * n
        e[0] = 1
        terms[(tuple(e), (0,) * n)] = ExactComplex(1)
    return MixedPolynomial(n, terms, MIXED)


@st.composite
def real_polys(draw, n=2, max_terms=5, max_exp=5):
    k = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(k):
        nu = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        if sum(nu) == 0:
            continue
        terms[(nu, (0,) * n)] = ExactComplex(draw(small_rat))
    if not terms:
        terms[((1,) + (0,) * (n - 1), (0,) * n)] = ExactComplex(1)
    return MixedPolynomial(n, terms, REAL)


# acceptance bookkeeping: criterion -> list of (clause, ok, detail)
ACCEPTANCE: dict[int, list] = {}
ACCEPTANCE_TITLES: dict[int, str] = {}


def record(criterion: int, clause: str, ok, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((clause, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_TITLES:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for k in sorted(ACCEPTANCE_TITLES):
        parts = ACCEPTANCE.get(k, [])
        ok = bool(parts) and all(p[1] for p in parts)
        tr.write_line(f"criterion {k:>2} {'PASS' if ok else 'FAIL'}  {ACCEPTANCE_TITLES[k]}")
        if not parts:
            tr.write_line("      FAIL  (did not run to completion)")
        for clause, good, detail in parts:
            tr.write_line(f"      {'ok  ' if good else 'FAIL'}  {clause}" + (f"  [{detail}]" if detail else ""))
