from fractions import Fraction

import pytest
import sympy

from drsum.arith import (Field, dispersion, integer_roots, primitive_root, render,
                         root_of_unity_order, shift, specialize)


def to_sympy(f):
    syms = sympy.symbols(" ".join(f.F.names))
    return sympy.sympify(render(f).replace("^", "**"), locals=dict(zip(f.F.names, syms)))


@pytest.fixture
def F():
    return Field.get(2, ("n",))


def test_field_cache_and_constants(F):
    assert Field.get(2, ("n",)) is F
    assert F.one + F.zero == F.one
    assert F(Fraction(6, 4)) == F(3) / F(2)


def test_rational_function_arithmetic_agrees_with_sympy(F):
    x, n = F.x, F.param("n")
    a = (x ** 2 - n) / (x + 1)
    b = (n * x + 3) / (x ** 2 + x + 1)
    X, N = sympy.symbols("x n")
    A = (X ** 2 - N) / (X + 1)
    B = (N * X + 3) / (X ** 2 + X + 1)
    for ours, ref in [(a + b, A + B), (a * b, A * B), (a / b, A / B), (a - b, A - B)]:
        assert sympy.simplify(to_sympy(ours) - ref) == 0


def test_normal_form_is_canonical(F):
    x = F.x
    f = (x ** 2 - 1) / (x - 1)
    assert f == x + 1
    assert f.denominator() == F.one.numerator()


def test_shift_and_substitution(F):
    x, n = F.x, F.param("n")
    f = (n - x) / (x + 1)
    assert shift(f, 1) == (n - x - 1) / (x + 2)
    assert f.subs_x(3) == (n - 3) / F(4)
    assert specialize(f, {"n": 5}) == (5 - x) / (x + 1)


def test_specialize_pole_raises(F):
    n = F.param("n")
    with pytest.raises(ZeroDivisionError):
        specialize(F.one / (n - 2), {"n": 2})


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6, 8, 12])
def test_cyclotomic_roots(m):
    K = Field.get(max(m, 2))
    z = primitive_root(m, K)
    assert root_of_unity_order(z) == m
    # sum of the primitive m-th roots is the Moebius function
    total = K.zero
    for k in range(1, m + 1):
        if sympy.gcd(k, m) == 1:
            total = total + z ** k
    assert total == K(int(sympy.mobius(m)))


def test_cyclotomic_inverse():
    K = Field.get(12)
    z = K.zeta
    a = z ** 3 + 2 * z + K(1)
    assert a * a.inverse() == K.one


def test_root_of_unity_order_rejects_non_roots(F):
    assert root_of_unity_order(F(2)) is None
    assert root_of_unity_order(F(-1)) == 2
    assert root_of_unity_order(F.param("n")) is None


def test_integer_roots(F):
    x, n = F.x, F.param("n")
    assert integer_roots((x - 3) * (x + 2) * (2 * x + 1)) == {3, -2}
    assert integer_roots(n - x) == set()


def test_dispersion_matches_brute_force(F):
    x = F.x
    p = (x + 1) * (x + 5)
    q = (x - 2) * (x + 1)
    X = sympy.Symbol("x")
    P, Q = (X + 1) * (X + 5), (X - 2) * (X + 1)
    brute = {j for j in range(0, 30) if sympy.degree(sympy.gcd(P.subs(X, X + j), Q), X) > 0}
    assert dispersion(p, q) == brute
    assert dispersion(x + 1, x + 5) == {4}


def test_render_round_trip(F):
    x, n = F.x, F.param("n")
    f = (n * x - 3) / (2 * x ** 2 + 1)
    assert to_sympy(f) == sympy.sympify("(n*x - 3)/(2*x**2 + 1)")
