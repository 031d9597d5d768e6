"""Nested sum/product expressions: AST, exact evaluation, rendering, normal form.

An expression lives in one free variable (``k`` at top level, the running
index inside a sum or product body).  Leaves are rational functions in that
variable and the parameters; ``Geo(b, v)`` is the power b^v of a constant.
Sums and products run from an integer lower bound to ``v + off`` where v is
the enclosing variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .arith import normalize, render as render_field, shift, specialize


class Expr:
    def __add__(self, o):
        return Add((self, _wrap(o, self)))

    def __radd__(self, o):
        return Add((_wrap(o, self), self))

    def __sub__(self, o):
        return Add((self, Mul((_wrap(-1, self), _wrap(o, self)))))

    def __mul__(self, o):
        return Mul((self, _wrap(o, self)))

    def __rmul__(self, o):
        return Mul((_wrap(o, self), self))

    def __neg__(self):
        return Mul((_wrap(-1, self), self))

    def __str__(self):
        return render(self)


def _wrap(o, like):
    if isinstance(o, Expr):
        return o
    F = field_of(like)
    return Rat(F(o), None)


@dataclass(frozen=True, eq=False)
class Rat(Expr):
    value: object       # element of K(x); x stands for ``var``
    var: str | None     # None when value is free of x


@dataclass(frozen=True, eq=False)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, eq=False)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True, eq=False)
class Geo(Expr):
    base: object        # nonzero constant of K
    var: str


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    idx: str
    lo: int
    var: str
    off: int
    body: Expr


@dataclass(frozen=True, eq=False)
class Product(Expr):
    idx: str
    lo: int
    var: str
    off: int
    body: Expr


NestedExpression = Expr


def field_of(e):
    if isinstance(e, Rat):
        return e.value.F
    if isinstance(e, Geo):
        return e.base.F
    if isinstance(e, (Add, Mul)):
        for t in (e.terms if isinstance(e, Add) else e.factors):
            return field_of(t)
    if isinstance(e, Pow):
        return field_of(e.base)
    if isinstance(e, (Sum, Product)):
        return field_of(e.body)
    raise TypeError(f"not an expression: {e!r}")


def children(e):
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Sum, Product)):
        return (e.body,)
    return ()


def walk(e):
    """Post-order traversal."""
    for c in children(e):
        yield from walk(c)
    yield e


def is_zero_expr(e):
    return isinstance(e, Rat) and e.value.is_zero()


# -- evaluation -----------------------------------------------------------------------

class Evaluator:
    """Exact evaluation with memoized running sums and products.

    Sum and product bodies only depend on their own index, so the value of
    such a node at N is a prefix of one cached list.  Instances are meant to
    be used by one thread at a time.
    """

    def __init__(self, F, params=None):
        self.F = F
        self.params = dict(params or {})
        self._prefix = {}
        self._leaf = {}

    def _ground(self, f):
        if not self.params:
            return f
        key = id(f)
        hit = self._leaf.get(key)
        if hit is None or hit[0] is not f:
            hit = (f, specialize(f, self.params))
            self._leaf[key] = hit
        return hit[1]

    def value(self, e, env):
        if isinstance(e, Rat):
            v = self._ground(e.value)
            if e.var is None:
                return v
            return v.subs_x(env[e.var])
        if isinstance(e, Add):
            acc = self.F.zero
            for t in e.terms:
                acc = acc + self.value(t, env)
            return acc
        if isinstance(e, Mul):
            acc = self.F.one
            for t in e.factors:
                acc = acc * self.value(t, env)
                if acc.is_zero():
                    return acc
            return acc
        if isinstance(e, Pow):
            b = self.value(e.base, env)
            if e.exp < 0 and b.is_zero():
                raise ZeroDivisionError(f"negative power of zero at {env}")
            return b ** e.exp
        if isinstance(e, Geo):
            return self._ground(e.base) ** env[e.var]
        if isinstance(e, (Sum, Product)):
            return self._running(e, env[e.var] + e.off)
        raise TypeError(f"cannot evaluate {e!r}")

    def _running(self, e, N):
        is_sum = isinstance(e, Sum)
        empty = self.F.zero if is_sum else self.F.one
        if N < e.lo:
            return empty
        acc = self._prefix.setdefault(id(e), (e, [empty]))[1]
        while len(acc) <= N - e.lo + 1:
            i = e.lo + len(acc) - 1
            v = self.value(e.body, {e.idx: i})
            acc.append(acc[-1] + v if is_sum else acc[-1] * v)
        return acc[N - e.lo + 1]


def evaluate(e, k, params=None, var="k", evaluator=None):
    ev = evaluator or Evaluator(field_of(e), params)
    return ev.value(e, {var: k})


def sequence(e, ks, params=None, var="k"):
    ev = Evaluator(field_of(e), params)
    return [ev.value(e, {var: k}) for k in ks]


# -- rendering ----------------------------------------------------------------------

_X = re.compile(r"\bx\b")


def _render_rat(f, var):
    s = render_field(f)
    s = s.replace("**", "^")
    if var is not None:
        s = _X.sub(var, s)
    return s


def _atomic(s):
    return not _has_top_level_op(s)


def _has_top_level_op(s):
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-*/ " and i > 0:
            return True
    return False


def _paren(s):
    return s if _atomic(s) else f"({s})"


def _bound(var, off):
    if off == 0:
        return var
    return f"{var}{off:+d}"


def render(e):
    if isinstance(e, Rat):
        return _render_rat(e.value, e.var)
    if isinstance(e, Add):
        if not e.terms:
            return "0"
        out = render(e.terms[0])
        for t in e.terms[1:]:
            s = render(t)
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out
    if isinstance(e, Mul):
        if not e.factors:
            return "1"
        if len(e.factors) == 1:
            return render(e.factors[0])
        head, rest = e.factors[0], [render(f) for f in e.factors[1:]]
        body = "*".join(_paren(p) for p in rest)
        if isinstance(head, Rat):
            num = _render_rat(head.value.numerator(), head.var)
            den = _render_rat(head.value.denominator(), head.var)
            if num == "-1":
                body = "-" + body
            elif num != "1":
                body = _paren(num) + "*" + body
            return body if den == "1" else f"{body}/{_paren(den)}"
        return _paren(render(head)) + "*" + body
    if isinstance(e, Pow):
        return f"{_paren(render(e.base))}^{e.exp}" if e.exp >= 0 else f"{_paren(render(e.base))}^({e.exp})"
    if isinstance(e, Geo):
        b = render_field(e.base)
        return f"{b if re.fullmatch(r'[0-9]+', b) else '(' + b + ')'}^{e.var}"
    if isinstance(e, Sum):
        return f"Sum({e.idx},{e.lo},{_bound(e.var, e.off)},{render(e.body)})"
    if isinstance(e, Product):
        return f"Product({e.idx},{e.lo},{_bound(e.var, e.off)},{render(e.body)})"
    raise TypeError(f"cannot render {e!r}")


# -- normal form ------------------------------------------------------------------------
#
# A normal form is a dict  monomial -> coefficient  where the coefficient is an
# element of K(x) (x standing for the free variable) and a monomial is a
# sorted tuple of (atom key, exponent).  Atom keys are strings; the atoms are
# kept in a side table so the normal form can be turned back into an
# expression.

def _atom_key(e, table):
    if isinstance(e, Geo):
        key = f"G[{render_field(e.base)}]"
    else:
        body = canonical_string(e.body)
        tag = "S" if isinstance(e, Sum) else "P"
        key = f"{tag}[{e.lo},{e.off},{body}]"
    table.setdefault(key, e)
    return key


def _nf_mul(a, b, F):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            d = dict(ma)
            for k, v in mb:
                d[k] = d.get(k, 0) + v
            m = tuple(sorted((k, v) for k, v in d.items() if v))
            out[m] = out.get(m, F.zero) + ca * cb
    return {m: c for m, c in out.items() if c}


def normal_form(e, table=None):
    """Normal form of ``e`` (see above); ``table`` collects the atoms."""
    table = {} if table is None else table
    F = field_of(e)
    if isinstance(e, Rat):
        return ({(): e.value} if e.value else {}), table
    if isinstance(e, Add):
        out = {}
        for t in e.terms:
            nf, _ = normal_form(t, table)
            for m, c in nf.items():
                out[m] = out.get(m, F.zero) + c
        return {m: c for m, c in out.items() if c}, table
    if isinstance(e, Mul):
        out = {(): F.one}
        for t in e.factors:
            nf, _ = normal_form(t, table)
            out = _nf_mul(out, nf, F)
        return _fold_geo(out, table, F), table
    if isinstance(e, Pow):
        nf, _ = normal_form(e.base, table)
        if e.exp < 0:
            if len(nf) != 1 or () not in nf:
                if len(nf) == 1:
                    (m, c), = nf.items()
                    if all(k.startswith("G[") for k, _ in m):
                        return {tuple((k, v * e.exp) for k, v in m): c ** e.exp}, table
                raise ValueError("negative power of a sum or product")
            return {(): nf[()] ** e.exp}, table
        out = {(): F.one}
        for _ in range(e.exp):
            out = _nf_mul(out, nf, F)
        return _fold_geo(out, table, F), table
    if isinstance(e, (Geo, Sum, Product)):
        return {((_atom_key(e, table), 1),): F.one}, table
    raise TypeError(f"no normal form for {e!r}")


def _fold_geo(nf, table, F):
    """Merge powers of constants in one variable into a single Geo atom."""
    out = {}
    for m, c in nf.items():
        geos = [(k, v) for k, v in m if k.startswith("G[")]
        if len(geos) <= 1 and all(v > 0 for _, v in geos):
            out[m] = out.get(m, F.zero) + c
            continue
        base = F.one
        var = None
        for k, v in geos:
            g = table[k]
            base = base * g.base ** v
            var = g.var
        rest = [(k, v) for k, v in m if not k.startswith("G[")]
        if not base.is_one():
            g = Geo(base, var)
            rest.append((_atom_key(g, table), 1))
        mm = tuple(sorted(rest))
        out[mm] = out.get(mm, F.zero) + c
    return {m: c for m, c in out.items() if c}


def canonical_string(e):
    """Deterministic text of the normal form; equal strings mean equal normal forms."""
    nf, _ = normal_form(e)
    if not nf:
        return "0"
    parts = []
    for m in sorted(nf, key=lambda m: (len(m), m)):
        c = render_field(nf[m])
        mono = "*".join(k if v == 1 else f"{k}^{v}" for k, v in m)
        parts.append(f"({c})*{mono}" if mono else f"({c})")
    # coefficients use x for the free variable, so bound names do not matter
    return " + ".join(parts)


def from_normal_form(nf, table, var, F):
    """Rebuild an expression (terms ordered like ``canonical_string``)."""
    terms = []
    for m in sorted(nf, key=lambda m: (len(m), m)):
        c = nf[m]
        factors = []
        for k, v in m:
            a = table[k]
            factors.append(a if v == 1 else Pow(a, v))
        if not factors:
            terms.append(Rat(c, var if not c.is_constant() else None))
        elif c.is_one():
            terms.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
        else:
            terms.append(Mul((Rat(c, var if not c.is_constant() else None),) + tuple(factors)))
    if not terms:
        return Rat(F.zero, None)
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def simplify(e, var="k"):
    """Collect like terms of ``e`` (rational coefficients combined)."""
    F = field_of(e)
    nf, table = normal_form(e)
    return from_normal_form(nf, table, var, F)


def same_structure(a, b):
    return canonical_string(a) == canonical_string(b)


def substitute_param(e, name, delta):
    """``e`` with the parameter ``name`` replaced by ``name + delta``."""
    F = field_of(e)
    gens = F.ctx.gens()
    i = 1 + F.params.index(name)
    sub = list(gens)
    sub[i] = gens[i] + delta

    def conv(f):
        if f.is_zero() or (f.num.degrees()[i] == 0 and f.den.degrees()[i] == 0):
            return f
        return normalize(f.num.compose(*sub), f.den.compose(*sub), F)

    def go(e):
        if isinstance(e, Rat):
            return Rat(conv(e.value), e.var)
        if isinstance(e, Add):
            return Add(tuple(go(t) for t in e.terms))
        if isinstance(e, Mul):
            return Mul(tuple(go(t) for t in e.factors))
        if isinstance(e, Pow):
            return Pow(go(e.base), e.exp)
        if isinstance(e, Geo):
            return Geo(conv(e.base), e.var)
        if isinstance(e, Sum):
            return Sum(e.idx, e.lo, e.var, e.off, go(e.body))
        if isinstance(e, Product):
            return Product(e.idx, e.lo, e.var, e.off, go(e.body))
        raise TypeError(repr(e))

    return go(e)


def shift_rat(f, j):
    return shift(f, j)
