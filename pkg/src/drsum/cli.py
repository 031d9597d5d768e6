"""Command line interface.

Exit status: 0 success, 1 negative decision, 2 unsupported input,
3 an internal cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from .arith import render as render_field
from .base import DegreeCapExceeded, UnsupportedInput
from .embed import EmbeddingError, verify_identity, _default_samples
from .frontend import ExprSyntaxError, Session, _as_fraction, expression_names, parse
from .nested import Evaluator, render
from .telescope import IndependenceCertificate, NoRecurrence
from .tower import TowerError, parse_tower, render as render_element
from .verify import verify_tower

OK, NEGATIVE, UNSUPPORTED, CAP = 0, 1, 2, 3


def _session(args, texts):
    names = set()
    for t in texts:
        names.update(expression_names(t))
    if getattr(args, "param", None):
        names.add(args.param)
    return Session(params=tuple(sorted(names)), refined=args.refined, strategy=args.strategy)


def _range(text):
    a, _, b = text.partition("..")
    try:
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError("range must look like a..b") from None
    if hi < lo:
        raise argparse.ArgumentTypeError("empty range")
    return range(lo, hi + 1)


def _to_float(v):
    return float(_as_fraction(v)) if v.is_rational() else None


def write_report(directory, expr_in, expr_out, ks, params, title):
    """CSV of both sides on ``ks`` and, when values are real, a PNG plot."""
    os.makedirs(directory, exist_ok=True)
    from .nested import field_of
    F = field_of(expr_in)
    ev_in, ev_out = Evaluator(F, params), Evaluator(F, params)
    rows = []
    for k in ks:
        a = ev_in.value(expr_in, {"k": k})
        b = ev_out.value(expr_out, {"k": k})
        rows.append((k, a, b))
    path = os.path.join(directory, "values.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "input", "output"])
        for k, a, b in rows:
            w.writerow([k, render_field(a), render_field(b)])
    xs = [k for k, _, _ in rows]
    ys = [_to_float(a) for _, a, _ in rows]
    zs = [_to_float(b) for _, _, b in rows]
    if any(v is None for v in ys + zs):
        return [path]
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, ys, "o", ms=4, label="input")
    ax.plot(xs, zs, "-", lw=1, label="reduced")
    ax.set_xlabel("k")
    ax.set_title(title, fontsize=8)
    ax.legend()
    fig.tight_layout()
    png = os.path.join(directory, "values.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [path, png]


# -- commands -----------------------------------------------------------------------------------

def cmd_reduce(args, out):
    s = _session(args, [args.expr])
    res = s.sigma_reduce(args.expr)
    print(f"{render(res.output)}", file=out)
    print(f"valid for k >= {res.delta}; {res.identity}", file=out)
    if args.verbose:
        print(s.dumps(), file=out)
    if args.report:
        params = _default_samples(s.F, 1)[0] if s.F.params else {}
        files = write_report(args.report, res.input, res.output, range(res.delta, res.delta + 41),
                             params, render(res.output))
        print("report: " + ", ".join(files), file=out)
    if args.session:
        with open(args.session, "w") as fh:
            fh.write(s.dumps())
    return OK


def cmd_zero(args, out):
    s = _session(args, [args.expr])
    z = s.is_zero(args.expr)
    if z.zero:
        print("zero", file=out)
        return OK
    print(f"not zero: reduces to {render(z.reduction.output)}; nonzero at k={z.witness}", file=out)
    return NEGATIVE


def cmd_telescope(args, out):
    s = _session(args, [args.expr])
    r = s.telescope(args.expr)
    if r is None:
        print("no telescoping solution in the current tower", file=out)
        return NEGATIVE
    g, e = r
    print(f"g(k) = {render(e)}", file=out)
    print("g(k+1) - g(k) = f(k)", file=out)
    return OK


def cmd_creative(args, out):
    s = _session(args, [args.summand])
    res = s.creative(args.summand, args.param, args.maxorder)
    if res.tried:
        print("no recurrence of order " + ", ".join(map(str, res.tried)), file=out)
    print(f"order {res.order}", file=out)
    for i, c in enumerate(res.coeffs, 1):
        print(f"c{i} = {render_field(c)}", file=out)
    print(f"g = {render_element(res.g)}", file=out)
    return OK


def cmd_independent(args, out):
    s = _session(args, args.exprs)
    cert = s.independent(args.exprs)
    if isinstance(cert, IndependenceCertificate):
        print(f"independent: no relation sigma(g) - g = sum c_i f_i with c != 0 "
              f"({len(args.exprs)} summands, strategy {cert.strategy})", file=out)
        print("tower: " + repr(s.T), file=out)
        return OK
    c, g = cert
    print("dependent: c = [" + ", ".join(render_field(v) for v in c) + f"], g = {render_element(g)}", file=out)
    return NEGATIVE


def cmd_tower(args, out):
    with open(args.file) as fh:
        T = parse_tower(fh.read())
    _, rep = verify_tower(T, strategy=args.strategy)
    print(rep.text(), file=out)
    return OK if rep.ok else NEGATIVE


def cmd_verify(args, out):
    names = sorted(set(expression_names(args.lhs)) | set(expression_names(args.rhs)))
    from .arith import Field
    F = Field.get(2, tuple(names))
    lhs, rhs = parse(args.lhs, F), parse(args.rhs, F)
    rep = verify_identity(None, lhs, rhs, args.range)
    print(str(rep), file=out)
    return OK if rep.ok else NEGATIVE


def build_parser():
    p = argparse.ArgumentParser(prog="drsum", description="Nested sums over difference rings.")
    p.add_argument("--strategy", choices=("recursive", "interlacing"), default=None)
    p.add_argument("--refined", action="store_true", help="search extra sum generators when telescoping fails")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="eliminate algebraic relations")
    r.add_argument("expr")
    r.add_argument("--report", metavar="DIR")
    r.add_argument("--session", metavar="FILE", help="write the session file")
    r.set_defaults(fn=cmd_reduce)

    z = sub.add_parser("zero", help="zero recognition")
    z.add_argument("expr")
    z.set_defaults(fn=cmd_zero)

    t = sub.add_parser("telescope", help="indefinite summation of a summand")
    t.add_argument("expr")
    t.set_defaults(fn=cmd_telescope)

    c = sub.add_parser("creative", help="creative telescoping in a parameter")
    c.add_argument("summand")
    c.add_argument("--param", default="n")
    c.add_argument("--maxorder", type=int, default=8)
    c.set_defaults(fn=cmd_creative)

    i = sub.add_parser("independent", help="certify that the sums of summands are independent")
    i.add_argument("exprs", nargs="+")
    i.set_defaults(fn=cmd_independent)

    tw = sub.add_parser("tower", help="tower files")
    tsub = tw.add_subparsers(dest="action", required=True)
    chk = tsub.add_parser("check", help="verify a tower file")
    chk.add_argument("file")
    chk.set_defaults(fn=cmd_tower)

    v = sub.add_parser("verify", help="compare two expressions on a range")
    v.add_argument("lhs")
    v.add_argument("rhs")
    v.add_argument("--range", type=_range, default=range(0, 101))
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args, out)
    except (ExprSyntaxError, UnsupportedInput, TowerError, EmbeddingError) as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return UNSUPPORTED
    except (DegreeCapExceeded, NoRecurrence) as exc:
        print(f"cap reached: {exc}", file=sys.stderr)
        return CAP


if __name__ == "__main__":
    sys.exit(main())
