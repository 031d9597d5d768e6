import pytest

from drsum.telescope import (IndependenceCertificate, NoRecurrence, PTDRInstance, certify_independence,
                             check_row, creative_telescope, same_span, solve_ptdr,
                             solve_ptdr_interlacing, solve_ptdr_recursive)

from conftest import standard_tower


def _tower_and_f():
    T = standard_tower(extra_sum=lambda F: -1 / (F.x + 1) ** 2)
    F = T.F
    x = F.x
    y, s1 = T.gen("y"), T.gen("s1")
    f = -2 * y * s1 * T(1 / (x + 1)) - y * T(1 / (x + 1)) + T((x + 3) / ((x + 1) ** 2 * (x + 2)))
    return T, f


@pytest.mark.parametrize("strategy", ["recursive", "interlacing"])
def test_telescoping_solution(strategy):
    T, f = _tower_and_f()
    b = solve_ptdr(T, [f], strategy=strategy)
    (c, g), = [r for r in b if any(r[0])]
    x = T.F.x
    s1, s2 = T.gen("s1"), T.gen("s2")
    assert c == [T.F.one]
    assert g == s1 + s1 ** 2 - s2 + T(1 / (x + 1))
    assert check_row(T, [f], c, g)


def test_strategies_agree_on_a_pair():
    T, f = _tower_and_f()
    p1 = T.gen("p1")
    fs = [f, p1, T.gen("y") * p1]
    assert same_span(solve_ptdr_recursive(T, fs), solve_ptdr_interlacing(T, fs))


def test_no_solution_gives_certificate():
    T = standard_tower()
    x = T.F.x
    cert = certify_independence(T, [T(1 / (x + 1)), T.gen("y") * T(1 / (x + 1) ** 2)])
    assert isinstance(cert, IndependenceCertificate)
    assert cert.recheck()


def test_dependent_summands_return_relation():
    T = standard_tower()
    x = T.F.x
    f = T(1 / (x + 1))
    out = certify_independence(PTDRInstance(T, [f, f.scale(T.F(3))]))
    c, g = out
    assert check_row(T, [f, f.scale(T.F(3))], c, g)


def test_creative_hits_cap():
    T = standard_tower()
    F = T.F
    x, n = F.x, F.param("n")
    f1 = T.gen("p2") * T.gen("s1") * (T.gen("y") * T.gen("p1") + T.gen("p1"))

    def fi(i):
        c = F.one
        for j in range(1, i):
            c = c * (n + j) / (n - x + j)
        return f1.scale(c)

    with pytest.raises(NoRecurrence):
        creative_telescope(T, fi, cap=2)


def test_binomial_recurrence():
    T = standard_tower()
    F = T.F
    x, n = F.x, F.param("n")
    b = T.gen("p2") * T(F.one)  # stands for binomial(n, k)

    def fi(i):
        c = F.one
        for j in range(1, i):
            c = c * (n + j) / (n - x + j)
        return b.scale(c)

    r = creative_telescope(T, fi, cap=3)
    assert r.order == 2
    assert r.coeffs[1] / r.coeffs[0] == F(-1) / F(2)
