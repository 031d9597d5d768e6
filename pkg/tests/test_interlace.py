import pytest

from drsum.arith import Field, primitive_root
from drsum.embed import EvaluationContext, evaluate
from drsum.interlace import (component_automorphism, decompose, idempotents, recompose,
                             sigma_on_components, subsequence_map)

from conftest import random_element, standard_tower


def _root(m):
    K = Field.get(max(m, 2))
    return primitive_root(m, K)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 12])
def test_idempotents_select_one_root(n):
    alpha = _root(n)
    B = idempotents(n, alpha)
    K = alpha.F
    for s, e in enumerate(B.elems):
        for u in range(n):
            val = sum((c * alpha ** (u * i) for i, c in enumerate(e)), K.zero)
            assert val == (K.one if u == n - 1 - s else K.zero)


def test_idempotents_reject_wrong_order():
    with pytest.raises(ValueError):
        idempotents(4, _root(2))


def test_decompose_recompose(rng):
    T = standard_tower()
    for _ in range(25):
        f = random_element(T, rng)
        assert recompose(T, decompose(T, f)) == f


def test_components_follow_sigma(rng):
    T = standard_tower()
    for _ in range(10):
        f = random_element(T, rng)
        assert sigma_on_components(T, decompose(T, f), 1) == decompose(T, T.sigma(f))
        # sigma^n acts on each component by its own automorphism
        comps = decompose(T, f)
        for s, c in enumerate(comps):
            R = component_automorphism(T, s)
            assert R.tower.sigma(c) == decompose(T, T.sigma(f, 2))[s]


def test_component_rings_have_step_n():
    T = standard_tower()
    R = component_automorphism(T, 0)
    assert R.tower.step == 2
    assert "y" not in R.tower.names


def test_interlacing_reproduces_the_sequence(rng):
    T = standard_tower()
    ctx = EvaluationContext.for_tower(T, params={"n": 7})
    pos = T.index("y")
    for _ in range(5):
        f = random_element(T, rng, laurent=False)
        seq = [evaluate(ctx, f, k) for k in range(4, 40)]
        comps = []
        for s in range(2):
            g = T.specialize_a(f, ((pos, 1 - s),))
            comps.append(subsequence_map(s, 2, [evaluate(ctx, g, k) for k in range(4, 40)]))
        # interlace ev_{n-1}, ..., ev_0
        merged = []
        for r in range(len(seq) // 2):
            merged += [comps[1][r], comps[0][r]]
        assert merged == seq
