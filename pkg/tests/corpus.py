"""Deterministic corpus of small two-variable mixed polynomials for the property suites."""
import numpy as np

from mixedsing.poly_core import ExactComplex, MixedPolynomial

CORPUS_SEED = 20240
CORPUS_SIZE = 50


def random_mixed(rng, max_terms=6, max_exp=6):
    terms = {}
    # one pure term per axis half of the time so that convenient polynomials show up
    for axis in (0, 1):
        if rng.random() < 0.5:
            a = int(rng.integers(1, max_exp + 1))
            b = int(rng.integers(0, a + 1))
            nu, mu = [0, 0], [0, 0]
            nu[axis], mu[axis] = b, a - b
            terms[(tuple(nu), tuple(mu))] = ExactComplex(int(rng.integers(1, 4)))
    while len(terms) < int(rng.integers(2, max_terms + 1)):
        nu = tuple(int(x) for x in rng.integers(0, 4, size=2))
        mu = tuple(int(x) for x in rng.integers(0, 3, size=2))
        if not 0 < sum(nu) + sum(mu) or max(a + b for a, b in zip(nu, mu)) > max_exp:
            continue
        terms[(nu, mu)] = ExactComplex(int(rng.integers(-3, 4)) or 1, int(rng.integers(-1, 2)))
    return MixedPolynomial(2, terms)


def corpus(size=CORPUS_SIZE, seed=CORPUS_SEED):
    rng = np.random.default_rng(seed)
    return [random_mixed(rng) for _ in range(size)]
