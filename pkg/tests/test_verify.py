import pytest

from drsum.arith import Field
from drsum.tower import Tower, TowerError, parse_tower, serialize_tower
from drsum.verify import (build_constant_witness, check_pi_monomial, check_r_monomial,
                          check_sigma_monomial, merge_a_monomials, verify_tower)

from conftest import standard_tower


@pytest.fixture
def F():
    return Field.get(2, ("n",))


def test_harmonic_sum_is_new(F):
    assert check_sigma_monomial(Tower(F), 1 / (F.x + 1)).independent


def test_telescoping_sum_is_refuted(F):
    x = F.x
    T = Tower(F)
    chk = check_sigma_monomial(T, 1 / ((x + 1) * (x + 2)))
    assert not chk.independent
    assert T.sigma(chk.g) - chk.g == T(1 / ((x + 1) * (x + 2)))


def test_products(F):
    x = F.x
    T = Tower(F)
    assert check_pi_monomial(T, T(F(2))).independent
    assert check_pi_monomial(T, T(x + 1)).independent
    chk = check_pi_monomial(T, T((x + 1) / x))
    assert not chk.independent and chk.m == 1
    assert T.sigma(chk.g) == chk.g * T((x + 1) / x)


def test_roots_of_unity():
    G = Field.get(12)
    z = G.zeta
    assert check_r_monomial(Tower(G), z, 12).fast_path == "primitive"
    chk = check_r_monomial(Tower(G), z ** 6, 4)
    assert not chk.independent and chk.m == 2
    T = Tower(G).adjoin_A("y", 3, z ** 4)
    assert check_r_monomial(T, z ** 3, 4).fast_path == "coprime"
    with pytest.raises(TowerError):
        check_r_monomial(Tower(G), G(2), 2)


def test_standard_tower_verifies():
    T2, rep = verify_tower(standard_tower(status=False), cross_check=True)
    assert rep.ok and T2.is_verified()
    assert [e.verdict for e in rep.entries] == ["r-ok", "pi-ok", "pi-ok", "sigma-ok"]


def test_stops_at_first_refutation(F):
    x = F.x
    T = Tower(F).adjoin_S("s", 1 / (x * (x + 1))).adjoin_S("t", 1 / (x + 1))
    T2, rep = verify_tower(T)
    assert [e.verdict for e in rep.entries] == ["refuted", "unverified"]
    assert rep.refuted().name == "s"
    with pytest.raises(TowerError):
        check_sigma_monomial(T2.prefix(1), 1 / (x + 1))


def test_constant_witness_is_sigma_invariant(F):
    x = F.x
    T = Tower(F).adjoin_P("p", (x + 1) / x)
    chk = check_pi_monomial(T.prefix(0), T.gens[0].alpha)
    w = build_constant_witness("pi", T, 0, (chk.m, chk.g))
    assert T.sigma(w.c) == w.c and T.sigma(w.h) == w.h


def test_merge_requires_several_a():
    G = Field.get(6)
    z = G.zeta
    T = Tower(G).adjoin_A("y1", 2, G(-1)).adjoin_A("y2", 3, z ** 2)
    T2, M = merge_a_monomials(T)
    assert len(T2.a_pos) == 1 and T2.gens[0].order == 6
    y1, y2 = T.gen("y1"), T.gen("y2")
    assert M.backward(M.forward(y1 * y2)) == y1 * y2


def test_tower_file_round_trip():
    text = serialize_tower(standard_tower(status=False))
    T2, rep = verify_tower(parse_tower(text))
    assert rep.ok
