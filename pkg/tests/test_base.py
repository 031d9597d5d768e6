import random

import pytest
import sympy

from drsum.arith import Field, render, shift
from drsum.base import (DegreeCapExceeded, check_pflde_row, solve_pflde, solve_pmt,
                        telescope_constant_ring, universal_denominator)

X = sympy.Symbol("x")


def sym(f):
    return sympy.sympify(render(f).replace("^", "**"), locals={"x": X})


def brute_pflde(a, fs, Q, N):
    """All (c, g) with g = P/Q, deg P <= N, by undetermined coefficients."""
    d = len(fs)
    cs = sympy.symbols(f"c0:{d}")
    ps = sympy.symbols(f"p0:{N + 1}")
    P = sum(p * X ** i for i, p in enumerate(ps))
    g = P / Q
    expr = sympy.together(g.subs(X, X + 1) + a * g - sum(c * f for c, f in zip(cs, fs)))
    num = sympy.expand(sympy.numer(expr))
    eqs = sympy.Poly(num, X).coeffs() if num != 0 else []
    unknowns = list(cs) + list(ps)
    M = sympy.Matrix([[sympy.diff(e, u) for u in unknowns] for e in eqs]) if eqs else sympy.zeros(1, len(unknowns))
    out = []
    for v in M.nullspace():
        c = list(v[:d])
        gg = sum(v[d + i] * X ** i for i in range(N + 1)) / Q
        out.append((c, sympy.cancel(gg)))
    return out


POINTS = [sympy.Rational(p, 7) for p in (1, 3, 11, 19, 23, 29, 37, 41, 53, 61, 67, 71)]


def as_vector(c, g):
    return list(c) + [g.subs(X, p) for p in POINTS]


def span_contains(rows, extra):
    A = sympy.Matrix([as_vector(*r) for r in rows]) if rows else sympy.zeros(0, 0)
    r0 = A.rank() if rows else 0
    B = sympy.Matrix([as_vector(*r) for r in rows + [extra]])
    return B.rank() == r0


A_CHOICES = ["-1", "-(x+1)/x", "-2", "x", "-(x+2)/(x+1)", "(x+3)/(x+1)"]


def _instances(count, seed):
    rng = random.Random(seed)
    F = Field.get(2)
    x = F.x
    for _ in range(count):
        a_txt = rng.choice(A_CHOICES)
        a = eval(a_txt.replace("x", "F.x"), {"F": F})
        if not hasattr(a, "F"):
            a = F(a)
        # planted solution of degree <= 3
        num = sum((F(rng.randint(-3, 3)) * x ** i for i in range(rng.randint(0, 3) + 1)), F.zero)
        den = F.one if rng.random() < 0.5 else (x + rng.randint(1, 3))
        g0 = num / den
        f1 = shift(g0, 1) + a * g0
        f2 = sum((F(rng.randint(-2, 2)) * x ** i for i in range(rng.randint(0, 3) + 1)), F.zero)
        if rng.random() < 0.5:
            f2 = f2 / (x + rng.randint(1, 4))
        yield a, [f1, f2], g0


@pytest.mark.parametrize("seed", range(12))
def test_pflde_complete_against_brute_force(seed):
    (a, fs, g0), = list(_instances(1, seed))
    basis = solve_pflde(a, fs)
    for c, g in basis:
        assert check_pflde_row(a, fs, c, g)
    ours = [([sym(ci) for ci in c], sym(g)) for c, g in basis]
    Q = sympy.prod([X + j for j in range(0, 6)]) ** 2
    brute = brute_pflde(sym(a), [sym(f) for f in fs], Q, 16)
    for row in brute:
        assert span_contains(ours, row)
    assert span_contains(ours, ([1, 0], sym(g0)))


def test_pflde_known_cases():
    F = Field.get(2, ("n",))
    x = F.x
    rows = solve_pflde(F(-1), [1 / (x * (x + 1))]).rows
    assert ([F.zero], F.one) in rows and ([F.one], -1 / x) in rows
    assert solve_pflde(F(-1), [1 / (x + 1)]).rows == [([F.zero], F.one)]
    # sigma(g) = (x+1)/x g has g = x
    assert ([F.zero], x) in solve_pflde(-(x + 1) / x, [F.zero]).rows
    # x! is not rational
    assert solve_pflde(-(x + 1), [F.zero]).rows == [([F.one], F.zero)]


def test_pflde_step_two():
    F = Field.get(2)
    x = F.x
    for c, g in solve_pflde(-(x + 1) / x, [x * x], step=2):
        assert shift(g, 2) - (x + 1) / x * g == c[0] * x * x


def test_pflde_degree_cap():
    F = Field.get(2)
    x = F.x
    with pytest.raises(DegreeCapExceeded):
        solve_pflde(F(-1), [x ** 40], cap=5)


def test_universal_denominator_divides():
    F = Field.get(2)
    x = F.x
    g = 1 / ((x + 1) * (x + 3))
    f = shift(g, 1) - g
    D = universal_denominator(F(-1), [f])
    assert divmod(D, g.denominator().num)[1] == 0


def test_pmt_lattices():
    F = Field.get(2, ("n",))
    x, n = F.x, F.param("n")
    assert [z for z, _ in solve_pmt([F(1)])] == [[1]]
    assert solve_pmt([F(2)]).basis == []
    (z, g), = solve_pmt([(x + 1) / x]).basis
    assert z == [1] and shift(g, 1) / g == (x + 1) / x
    (z, g), = solve_pmt([(n - x) / (x + 1), F(2), -4 * (1 + n - x) / (x + 1)]).basis
    assert z == [2, 4, -2]
    assert shift(g, 1) / g == ((n - x) / (x + 1)) ** 2 * F(16) * (-4 * (1 + n - x) / (x + 1)) ** -2


def test_telescope_in_constant_ring():
    F = Field.get(2)
    assert telescope_constant_ring(F(-1), {1: F(-2)}) == {1: F.one}
    K = Field.get(3)
    g = telescope_constant_ring(K.zeta, {1: K.one})
    assert g[1] * (K.zeta - 1) == K.one
    with pytest.raises(ValueError):
        telescope_constant_ring(F(-1), {0: F.one})
