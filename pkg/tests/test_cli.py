import io

from drsum.cli import main

F_TERM = "Binomial({n},k)*((-2)^k+2^k)*Sum(i,1,k,(-1)^i/i)"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_reduce():
    code, out = run("reduce", "Sum(i,1,k,(-1)^i/(i*(1+i)))")
    assert code == 0
    assert "agree on" in out


def test_zero_and_not_zero():
    code, out = run("zero", "Sum(j,1,k,(-1)^j/j) - Sum(j,1,k,(-1)^j/j)")
    assert code == 0 and out.strip() == "zero"
    code, out = run("zero", "Sum(j,1,k,1/j)")
    assert code == 1 and "k=1" in out


def test_telescope():
    assert run("telescope", "1/(k*(k+1))") == (0, "g(k) = -1/k\ng(k+1) - g(k) = f(k)\n")
    assert run("telescope", "1/k")[0] == 1


def test_creative_small():
    code, out = run("creative", "Binomial(n,k)", "--param", "n", "--maxorder", "3")
    assert code == 0 and "order 2" in out


def test_creative_cap_exit_code():
    code, _ = run("creative", F_TERM.format(n="n"), "--param", "n", "--maxorder", "2")
    assert code == 3


def test_independent():
    exprs = [F_TERM.format(n=f"n+{i}" if i else "n") for i in range(4)]
    code, out = run("independent", *exprs)
    assert code == 0 and out.startswith("independent")
    assert run("independent", "1/(k*(k+1))", "1")[0] == 1


def test_unsupported_input():
    assert run("reduce", "Sum(i,1,k,1/(i-")[0] == 2
    assert run("reduce", "Product(i,1,k,Product(j,1,i,j))")[0] == 2


def test_verify_range():
    assert run("verify", "Sum(i,1,k,i)", "k*(k+1)/2", "--range", "0..50")[0] == 0
    assert run("verify", "Sum(i,1,k,i)", "k^2", "--range", "0..5")[0] == 1


def test_tower_check(tmp_path):
    p = tmp_path / "t.tower"
    from drsum.tower import serialize_tower
    from conftest import standard_tower
    p.write_text(serialize_tower(standard_tower(status=False)))
    code, out = run("tower", "check", str(p))
    assert code == 0 and "basic" in out


def test_report_files(tmp_path):
    code, out = run("reduce", "Sum(i,1,k,(-1)^i/i)^2", "--report", str(tmp_path))
    assert code == 0
    assert (tmp_path / "values.csv").read_text().startswith("k,input,output")
    assert (tmp_path / "values.png").stat().st_size > 0


def test_session_file(tmp_path):
    p = tmp_path / "s.txt"
    assert run("reduce", "Sum(i,1,k,1/i)", "--session", str(p))[0] == 0
    assert "[tower]" in p.read_text()


def test_strategy_flag():
    for strategy in ("recursive", "interlacing"):
        assert run("--strategy", strategy, "telescope", "(-1)^k/(k*(k+1))")[0] == 1
        assert run("--strategy", strategy, "telescope", "(-1)^k/k - (-1)^(k+1)/(k+1)")[0] == 0
