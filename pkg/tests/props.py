"""Randomized law checks shared by the property tests and the acceptance run."""

import random
from fractions import Fraction

import sympy

from drsum.arith import Field, primitive_root, render as render_field, shift
from drsum.base import check_pflde_row, solve_pflde
from drsum.embed import L_of, evaluate
from drsum.interlace import component_automorphism, decompose, idempotents, recompose, sigma_on_components
from drsum.telescope import check_row, same_span, solve_ptdr_interlacing, solve_ptdr_recursive
from drsum.tower import Tower
from drsum.verify import merge_a_monomials

from conftest import random_element


# -- idempotents ---------------------------------------------------------------------

def _mul_mod(a, b, n, K):
    out = [K.zero] * n
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[(i + j) % n] = out[(i + j) % n] + u * v
    return out


def check_idempotents(n):
    K = Field.get(max(n, 2))
    alpha = primitive_root(n, K)
    es = idempotents(n, alpha).elems
    one = [K.one] + [K.zero] * (n - 1)
    assert [sum(col, K.zero) for col in zip(*es)] == one
    for s, e in enumerate(es):
        assert _mul_mod(e, e, n, K) == e
        for t in range(n):
            if t != s:
                assert not any(_mul_mod(e, es[t], n, K))
        # sigma(e_s) = e_{s+1}: y -> alpha y
        assert [c * alpha ** i for i, c in enumerate(e)] == es[(s + 1) % n]


# -- components ---------------------------------------------------------------------

def check_components(T, rng):
    f, g = random_element(T, rng), random_element(T, rng)
    cf, cg = decompose(T, f), decompose(T, g)
    assert recompose(T, cf) == f
    assert decompose(T, f * g) == [a * b for a, b in zip(cf, cg)]
    assert decompose(T, f + g) == [a + b for a, b in zip(cf, cg)]
    assert sigma_on_components(T, cf, 1) == decompose(T, T.sigma(f))
    assert sigma_on_components(T, cf, -1) == decompose(T, T.sigma(f, -1))
    for s, c in enumerate(cf):
        ring = component_automorphism(T, s).tower
        assert ring.sigma(c) == decompose(T, T.sigma(f, 2))[s]


# -- embedding laws -----------------------------------------------------------------

def check_embedding(ctx, rng, span=3):
    T = ctx.T
    f, g = random_element(T, rng), random_element(T, rng)
    L = max(L_of(ctx, f), L_of(ctx, g))
    c = T.F(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
    for k in range(L, L + span):
        a, b = evaluate(ctx, f, k), evaluate(ctx, g, k)
        assert evaluate(ctx, f * g, k) == a * b
        assert evaluate(ctx, f + g, k) == a + b
        assert evaluate(ctx, f.scale(c), k) == c * a
    for k in range(L_of(ctx, f), L_of(ctx, f) + span):
        assert evaluate(ctx, T.sigma(f), k) == evaluate(ctx, f, k + 1)


# -- merge maps ---------------------------------------------------------------------

MERGE_CASES = {
    (2, 3): (6, [(2, 3), (3, 2)]),
    (2, 3, 5): (30, [(2, 15), (3, 10), (5, 6)]),
    (3, 4): (12, [(3, 4), (4, 3)]),
}


def merge_tower(orders):
    m, data = MERGE_CASES[orders]
    K = Field.get(m)
    T = Tower(K)
    for i, (lam, e) in enumerate(data):
        T = T.adjoin_A(f"y{i + 1}", lam, K.zeta ** e)
    T = T.adjoin_P("p", K.x + 1).adjoin_S("s", 1 / (K.x + 1))
    return T, merge_a_monomials(T)


def check_merge(T, T2, M, rng):
    f, g = random_element(T, rng), random_element(T, rng)
    assert M.backward(M.forward(f)) == f
    assert M.forward(T.sigma(f)) == T2.sigma(M.forward(f))
    assert M.forward(f * g) == M.forward(f) * M.forward(g)
    assert M.forward(f + g) == M.forward(f) + M.forward(g)


# -- solvers -------------------------------------------------------------------------

def small_tower():
    F = Field.get(2, ("n",))
    x = F.x
    T = Tower(F).adjoin_A("y", 2, F(-1)).adjoin_P("p1", 2)
    T = T.adjoin_S("s1", -T.gen("y") * T(1 / (x + 1)))
    return T.with_status(["verified"] * 3)


def random_ptdr(T, rng):
    """One or two summands; half of the time the first is planted as sigma(g) - g."""
    fs = []
    for _ in range(rng.randint(1, 2)):
        f = random_element(T, rng, terms=2, maxexp=1, laurent=False)
        if rng.random() < 0.5:
            g = random_element(T, rng, terms=2, maxexp=1, laurent=False)
            f = T.sigma(g) - g
        fs.append(f)
    return fs


def check_strategies(T, rng):
    fs = random_ptdr(T, rng)
    b1 = solve_ptdr_recursive(T, fs)
    b2 = solve_ptdr_interlacing(T, fs)
    for c, g in list(b1) + list(b2):
        assert check_row(T, fs, c, g)
    assert same_span(b1, b2)


# PFLDE brute force with sympy undetermined coefficients

X = sympy.Symbol("x")
POINTS = [sympy.Rational(p, 7) for p in (1, 3, 11, 19, 23, 29, 37, 41, 53, 61, 67, 71)]


def _sym(f):
    return sympy.sympify(render_field(f).replace("^", "**"), locals={"x": X})


def brute_pflde(a, fs, Q, N):
    d = len(fs)
    cs = sympy.symbols(f"c0:{d}")
    ps = sympy.symbols(f"p0:{N + 1}")
    g = sum(p * X ** i for i, p in enumerate(ps)) / Q
    expr = sympy.together(g.subs(X, X + 1) + a * g - sum(c * f for c, f in zip(cs, fs)))
    num = sympy.expand(sympy.numer(expr))
    unknowns = list(cs) + list(ps)
    if num == 0:
        M = sympy.zeros(1, len(unknowns))
    else:
        eqs = sympy.Poly(num, X).coeffs()
        M = sympy.Matrix([[sympy.diff(e, u) for u in unknowns] for e in eqs])
    out = []
    for v in M.nullspace():
        gg = sum(v[d + i] * X ** i for i in range(N + 1)) / Q
        out.append((list(v[:d]), sympy.cancel(gg)))
    return out


def _vector(c, g):
    return list(c) + [g.subs(X, p) for p in POINTS]


def _rank(rows):
    return sympy.Matrix([_vector(*r) for r in rows]).rank() if rows else 0


A_CHOICES = ("-1", "-(x+1)/x", "-2", "x", "-(x+2)/(x+1)", "(x+3)/(x+1)")


def check_pflde(rng):
    F = Field.get(2)
    x = F.x
    a = F.one * eval(rng.choice(A_CHOICES), {"x": x})
    num = sum((F(rng.randint(-3, 3)) * x ** i for i in range(rng.randint(0, 3) + 1)), F.zero)
    den = F.one if rng.random() < 0.5 else x + rng.randint(1, 3)
    g0 = num / den
    f2 = sum((F(rng.randint(-2, 2)) * x ** i for i in range(rng.randint(0, 3) + 1)), F.zero)
    if rng.random() < 0.5:
        f2 = f2 / (x + rng.randint(1, 4))
    fs = [shift(g0, 1) + a * g0, f2]
    basis = solve_pflde(a, fs)
    for c, g in basis:
        assert check_pflde_row(a, fs, c, g)
    ours = [([_sym(ci) for ci in c], _sym(g)) for c, g in basis]
    r0 = _rank(ours)
    assert r0 == len(ours)
    Q = sympy.prod([X + j for j in range(0, 6)]) ** 2
    for row in brute_pflde(_sym(a), [_sym(f) for f in fs], Q, 16) + [([1, 0], _sym(g0))]:
        assert _rank(ours + [row]) == r0


def seeded(seed):
    return random.Random(seed)
