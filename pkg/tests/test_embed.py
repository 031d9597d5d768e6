from fractions import Fraction
from math import comb

import pytest

from drsum.arith import Field
from drsum.embed import (EmbeddingError, EvaluationContext, L_of, Z_of, dump_csv, evaluate,
                         expr_k, extend_context, verify_identity)
from drsum.nested import evaluate as eval_expr, render
from drsum.tower import Tower

from conftest import random_element, standard_tower


def E1(k):
    return sum((Fraction((-1) ** i, i) for i in range(1, k + 1)), Fraction(0))


@pytest.fixture
def ctx():
    return EvaluationContext.for_tower(standard_tower())


def test_generator_sequences(ctx):
    T = ctx.T
    F = T.F
    assert [evaluate(ctx, T.gen("y"), k) for k in range(4)] == [F(1), F(-1), F(1), F(-1)]
    assert [evaluate(ctx, T.gen("p1"), k) for k in range(5)] == [F(2 ** k) for k in range(5)]
    c5 = ctx.with_params({"n": 5})
    assert [evaluate(c5, T.gen("p2"), k) for k in range(8)] == [F(comb(5, k)) for k in range(8)]
    assert [evaluate(ctx, T.gen("s1"), k) for k in range(8)] == [F(E1(k)) for k in range(8)]


def test_nested_sum_values(ctx):
    T = ctx.T
    x = T.F.x
    y, s1 = T.gen("y"), T.gen("s1")
    b3 = (T(3 + x) - T((x + 1) * (x + 2)) * y * (2 * s1 + 1)) * T(1 / ((x + 1) ** 2 * (x + 2)))
    for k in range(21):
        want = Fraction(3 + k - (k + 1) * (k + 2) * (-1) ** k * (2 * E1(k) + 1), (k + 1) ** 2 * (k + 2))
        assert evaluate(ctx, b3, k) == T.F(want)


def test_induced_expressions_evaluate_like_the_ring(ctx, rng):
    T = ctx.T
    c7 = ctx.with_params({"n": 7})
    for _ in range(10):
        f = random_element(T, rng, laurent=False)
        e = expr_k(ctx, f)
        L = L_of(ctx, f)
        for k in range(L, L + 15):
            assert eval_expr(e, k, {"n": 7}) == evaluate(c7, f, k)


def test_induced_expression_rendering(ctx):
    T = ctx.T
    x = T.F.x
    assert render(expr_k(ctx, T.gen("s1"))) == "Sum(i,1,k,(-1)^i/i)"
    assert render(expr_k(ctx, T.gen("p1"))) == "2^k"
    assert render(expr_k(ctx, T(T.F(3)))) == "3"
    b2 = -T.gen("y") * T(1 / ((x + 1) * (x + 2)))
    assert render(expr_k(ctx, b2)) == "-(-1)^k/(k^2 + 3*k + 2)"


def test_o_and_z_functions():
    F = Field.get(2)
    x = F.x
    T = Tower(F).adjoin_P("p", (x - 2) / (x + 1))
    ctx = EvaluationContext.for_tower(T)
    assert ctx.data[0].r == 4
    assert Z_of(ctx, T((x - 2) / (x + 1))) == 3
    assert L_of(ctx, T(1 / (x - 4))) == 5
    with pytest.raises(EmbeddingError):
        extend_context(EvaluationContext.for_tower(Tower(F)), T, r=2)


def test_sum_lower_bound_must_exceed_pole():
    F = Field.get(2)
    T = Tower(F).adjoin_S("s", 1 / (F.x - 3))
    with pytest.raises(EmbeddingError):
        EvaluationContext.for_tower(T, choices={"s": (2, 0)})
    ctx = EvaluationContext.for_tower(T)
    assert ctx.data[0].r == 5


def test_csv_dump(ctx):
    text = dump_csv(ctx, ctx.T.gen("s1"), range(3))
    assert text.splitlines() == ["k,value", "0,0", "1,-1", "2,-1/2"]


def test_verify_identity_reports_mismatch(ctx):
    T = ctx.T
    rep = verify_identity(ctx, T.gen("s1"), T.gen("s1"))
    assert rep.ok
    rep = verify_identity(ctx, T.gen("s1"), T.gen("s1") + T(1 / (T.F.x + 1)))
    assert not rep.ok and rep.mismatch[0] == 0
