import pytest

from drsum.arith import Field
from drsum.tower import (Tower, TowerError, is_unit, is_zero_divisor, parse_element, parse_tower,
                         render, reorder, serialize_tower)

from conftest import random_element


def test_generator_shifts(tower):
    T = tower
    F = T.F
    x, n = F.x, F.param("n")
    y, p1, p2, s1 = (T.gen(v) for v in ("y", "p1", "p2", "s1"))
    assert T.sigma(y) == -y
    assert T.sigma(p1) == 2 * p1
    assert T.sigma(p2) == p2 * T((n - x) / (x + 1))
    assert T.sigma(s1) == s1 - y * T(F.one / (x + 1))
    assert y ** 2 == T.one


def test_sigma_is_an_automorphism(tower, rng):
    T = tower
    for _ in range(20):
        f, g = random_element(T, rng), random_element(T, rng)
        assert T.sigma(f * g) == T.sigma(f) * T.sigma(g)
        assert T.sigma(f + g) == T.sigma(f) + T.sigma(g)
        assert T.sigma(T.sigma(f), -1) == f
        assert T.sigma(f, 3) == T.sigma(T.sigma(T.sigma(f)))


def test_serialization_round_trip(tower):
    text = serialize_tower(tower)
    T2 = parse_tower(text)
    assert serialize_tower(T2) == text


def test_element_render_round_trip(tower, rng):
    for _ in range(20):
        f = random_element(tower, rng)
        assert parse_element(render(f), tower) == f


def test_reorder_maps_are_inverse(rng):
    F = Field.get(2, ("n",))
    x = F.x
    T = Tower(F).adjoin_S("s", 1 / (x + 1)).adjoin_A("y", 2, F(-1)).adjoin_P("p", x + 1)
    T2, fw, bw = reorder(T, "PAS")
    assert [g.kind for g in T2.gens] == ["P", "A", "S"]
    for _ in range(10):
        f = random_element(T, rng)
        assert bw(fw(f)) == f
        assert fw(T.sigma(f)) == T2.sigma(fw(f))


def test_units_and_zero_divisors(tower):
    T = tower
    y, p1, s1 = T.gen("y"), T.gen("p1"), T.gen("s1")
    ok, inv = is_unit(T, p1 * y)
    assert ok and inv * p1 * y == T.one
    assert is_unit(T, s1) == (False, None)
    assert is_zero_divisor(T, T.one + y)
    assert not is_zero_divisor(T, T.one + y * 2)
    assert is_zero_divisor(T, T.zero)
    ok, inv = is_unit(T, T.one + y * 2)
    assert ok and inv * (T.one + y * 2) == T.one


def test_invalid_generators_rejected():
    F = Field.get(2)
    T = Tower(F)
    with pytest.raises(TowerError):
        T.adjoin_A("y", 2, F(2))
    with pytest.raises(TowerError):
        T.adjoin_A("y", 3, F(1))
    T = T.adjoin_S("s", 1 / (F.x + 1))
    with pytest.raises(TowerError):
        T.adjoin_P("p", T.gen("s"))


def test_non_invertible_division(tower):
    with pytest.raises(TowerError):
        tower.one / tower.gen("s1")
