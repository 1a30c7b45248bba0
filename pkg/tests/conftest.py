import random

import pytest

from morsejets import parse_expr
from morsejets.jet import Jet, DiffeoJet


def P(expr, n=2, K=8, mode="exact"):
    return parse_expr(expr, n, K, mode)


def random_poly(rng, n, lo, hi, K, density=0.5, size=3):
    """Random polynomial with small rational coefficients in degrees lo..hi."""
    from fractions import Fraction
    from morsejets.jet import monomials
    from morsejets import coeff as C
    terms = {}
    for d in range(lo, hi + 1):
        for e in monomials(n, d):
            if rng.random() < density:
                c = Fraction(rng.randint(-size, size), rng.randint(1, 3))
                if c:
                    terms[tuple(e)] = C.convert(c, "exact")
    return Jet(n, K, terms, "exact")


def random_diffeo(rng, n, K, hi=3, linear=True):
    """Random diffeo; with linear=False its linear part is the identity."""
    from morsejets import coeff as C
    while linear:
        M = [[C.convert(rng.randint(-2, 2), "exact") + (1 if i == j else 0) for j in range(n)]
             for i in range(n)]
        from morsejets import linalg as LA
        if not C.is_zero(LA.det(M, "exact"), "exact"):
            break
    else:
        M = [[C.convert(int(i == j), "exact") for j in range(n)] for i in range(n)]
    L = DiffeoJet.from_matrix(M, K, "exact")
    comps = [c + random_poly(rng, n, 2, hi, K, 0.4, 2) for c in L.components]
    return DiffeoJet(comps)


@pytest.fixture
def rng():
    return random.Random(1234)
