import random
from fractions import Fraction

import pytest

from drsum.arith import Field
from drsum.tower import Tower


def standard_tower(extra_sum=None, status=True):
    """K(x)[y]<p1><p2>[s1] with y^2 = 1; optionally one more sum generator."""
    F = Field.get(2, ("n",))
    x, n = F.x, F.param("n")
    T = Tower(F).adjoin_A("y", 2, F(-1)).adjoin_P("p1", 2).adjoin_P("p2", (n - x) / (x + 1))
    y = T.gen("y")
    T = T.adjoin_S("s1", -y / (x + 1))
    if extra_sum is not None:
        T = T.adjoin_S("s2", extra_sum(F))
    if status:
        T = T.with_status(["verified"] * len(T.gens))
    return T


@pytest.fixture
def tower():
    return standard_tower()


def random_ground(F, rng, deg=1, params=True):
    x = F.x
    def poly():
        p = F.zero
        for i in range(rng.randint(0, deg) + 1):
            c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if params and F.params and rng.random() < 0.3:
                p = p + F.param(F.params[0]) * x ** i
            else:
                p = p + F(c) * x ** i
        return p
    num = poly()
    den = x + rng.randint(1, 4) if rng.random() < 0.5 else F.one
    return num / den


def random_element(T, rng, terms=3, maxexp=2, laurent=True):
    """Random element: a few monomials with small ground coefficients."""
    out = T.zero
    for _ in range(rng.randint(1, terms)):
        m = T.one
        for i, g in enumerate(T.gens):
            if g.kind == "A":
                e = rng.randint(0, g.order - 1)
            elif g.kind == "P":
                e = rng.randint(-1 if laurent else 0, maxexp)
            else:
                e = rng.randint(0, maxexp)
            if e:
                m = m * T.gen(i) ** e
        out = out + m * T(random_ground(T.F, rng))
    return out


@pytest.fixture
def rng():
    return random.Random(20240611)
