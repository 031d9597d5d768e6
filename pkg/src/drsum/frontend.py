"""Parsing nested sum expressions and rewriting them over RPiSigma-towers.

Grammar (``^`` is exponentiation)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := ['-'] atom ['^' power]
    atom    := integer | identifier | '(' expr ')'
             | Sum(i, lo, bound, expr) | Product(i, lo, bound, expr)
             | Binomial(expr, bound) | Factorial(bound)
    bound   := var | var '+' integer | var '-' integer

The top-level variable is ``k``; inside ``Sum(i, ...)`` the variable is i.
``c^var`` with a constant c is a geometric term.  Divisions are allowed by
rational functions only.

:class:`Session` owns one tower, its evaluation context and a table from the
sums and products met so far to tower elements; :meth:`Session.sigma_reduce`
returns an equivalent expression whose sums and products are algebraically
independent.
"""

from __future__ import annotations

import ast
import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from .arith import Field, normalize, root_of_unity_order, shift
from .base import UnsupportedInput, _factor_z_free, _FactorBase
from .embed import (EvaluationContext, IdentityReport, L_ground, L_of, Z_of,
                    evaluate as ev, expr_k, extend_context, verify_identity)
from .nested import (Add, Evaluator, Expr, Geo, Mul, Pow, Product, Rat, Sum,
                     canonical_string, field_of, render, simplify,
                     substitute_param, walk)
from .telescope import certify_independence, creative_telescope, solve_ptdr
from .tower import (VERIFIED, RingElement, Tower, TowerError, parse_element, parse_tower,
                    render as render_element, serialize_tower)
from .verify import check_pi_monomial, check_r_monomial, verify_tower

log = logging.getLogger(__name__)

TOP = "k"
FUNCTIONS = ("Sum", "Product", "Binomial", "Factorial")


# -- parsing ---------------------------------------------------------------------------------

class ExprSyntaxError(SyntaxError):
    """Syntax or well-formedness error with a 1-based column."""

    def __init__(self, msg, col=None, text=None):
        where = f" (column {col})" if col is not None else ""
        super().__init__(msg + where)
        self.col, self.src = col, text


def _column_map(text):
    """Map columns of the '^' -> '**' rewritten text back to the original."""
    out = []
    for i, ch in enumerate(text):
        out.append(i)
        if ch == "^":
            out.append(i)
    out.append(len(text))
    return out


def expression_names(text):
    """Identifiers that act as parameters (neither functions nor variables)."""
    tree = _parse_tree(text)
    bound = {TOP}
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in ("Sum", "Product"):
            if node.args and isinstance(node.args[0], ast.Name):
                bound.add(node.args[0].id)
        if isinstance(node, ast.Name):
            names.add(node.id)
    return sorted(n for n in names if n not in bound and n not in FUNCTIONS)


def _parse_tree(text):
    src = text.replace("^", "**")
    try:
        return ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        cols = _column_map(text)
        col = cols[min((exc.offset or 1) - 1, len(cols) - 1)] + 1
        raise ExprSyntaxError(f"syntax error: {exc.msg}", col, text) from None


def parse(text, F=None):
    """Nested expression for ``text`` over F (built from the identifiers if omitted)."""
    tree = _parse_tree(text)
    names = expression_names(text)
    if F is None:
        F = Field.get(2, tuple(names))
    else:
        unknown = [n for n in names if n not in F.params]
        if unknown:
            raise ExprSyntaxError(f"unknown identifier {unknown[0]!r}", None, text)
    return _Converter(F, text).convert(tree.body, TOP, frozenset())


class _Converter:
    def __init__(self, F, text):
        self.F = F
        self.text = text
        self.cols = _column_map(text)

    def err(self, msg, node):
        off = getattr(node, "col_offset", None)
        col = self.cols[min(off, len(self.cols) - 1)] + 1 if off is not None else None
        return ExprSyntaxError(msg, col, self.text)

    def rat(self, v, var):
        return Rat(v, None if v.is_constant() else var)

    def convert(self, node, var, outer):
        F = self.F
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise self.err("only integer literals are allowed", node)
            return Rat(F(node.value), None)
        if isinstance(node, ast.Name):
            if node.id == var:
                return Rat(F.x, var)
            if node.id in outer:
                raise self.err(f"outer variable {node.id!r} used inside a sum or product body", node)
            if node.id in F.params:
                return Rat(F.param(node.id), None)
            raise self.err(f"unknown identifier {node.id!r}", node)
        if isinstance(node, ast.UnaryOp):
            a = self.convert(node.operand, var, outer)
            if isinstance(node.op, ast.USub):
                return self.rat(-a.value, var) if isinstance(a, Rat) else Mul((Rat(-F.one, None), a))
            if isinstance(node.op, ast.UAdd):
                return a
            raise self.err("unsupported unary operator", node)
        if isinstance(node, ast.BinOp):
            return self.binop(node, var, outer)
        if isinstance(node, ast.Call):
            return self.call(node, var, outer)
        raise self.err(f"unsupported syntax {type(node).__name__}", node)

    def binop(self, node, var, outer):
        op = node.op
        if isinstance(op, ast.Pow):
            return self.power(node, var, outer)
        a = self.convert(node.left, var, outer)
        b = self.convert(node.right, var, outer)
        both = isinstance(a, Rat) and isinstance(b, Rat)
        if isinstance(op, ast.Add):
            return self.rat(a.value + b.value, var) if both else Add((a, b))
        if isinstance(op, ast.Sub):
            if both:
                return self.rat(a.value - b.value, var)
            return Add((a, Mul((Rat(-self.F.one, None), b))))
        if isinstance(op, ast.Mult):
            return self.rat(a.value * b.value, var) if both else Mul((a, b))
        if isinstance(op, ast.Div):
            if not isinstance(b, Rat):
                raise self.err("division by a sum or product is not allowed: quotients of "
                               "nested sums leave the class of nested sum expressions", node.right)
            if b.value.is_zero():
                raise self.err("division by zero", node.right)
            inv = b.value.inverse()
            return self.rat(a.value * inv, var) if both else Mul((a, self.rat(inv, var)))
        raise self.err("unsupported operator", node)

    def power(self, node, var, outer):
        base = self.convert(node.left, var, outer)
        e = _int_literal(node.right)
        if e is not None:
            if isinstance(base, Rat):
                if e < 0 and base.value.is_zero():
                    raise self.err("negative power of zero", node)
                return self.rat(base.value ** e, var)
            if e < 0 and any(isinstance(n, (Sum, Product)) for n in walk(base)):
                raise self.err("negative powers of sums or products are not allowed", node)
            return Pow(base, e) if e != 1 else base
        off = self.bound(node.right, var)
        if not isinstance(base, Rat) or not base.value.is_constant() or base.value.is_zero():
            raise self.err("symbolic exponents need a nonzero constant base", node)
        g = Geo(base.value, var)
        return g if off == 0 else Mul((Rat(base.value ** off, None), g))

    def bound(self, node, var):
        """Offset j of a bound ``var + j``."""
        if isinstance(node, ast.Name) and node.id == var:
            return 0
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
            if isinstance(node.left, ast.Name) and node.left.id == var:
                j = _int_literal(node.right)
                if j is not None:
                    return j if isinstance(node.op, ast.Add) else -j
        raise self.err(f"bound must be {var}, {var}+j or {var}-j", node)

    def call(self, node, var, outer):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise self.err("unknown function", node)
        name = node.func.id
        args = node.args
        if node.keywords:
            raise self.err("keyword arguments are not supported", node)
        F = self.F
        if name in ("Sum", "Product"):
            if len(args) != 4:
                raise self.err(f"{name} takes (index, lower, bound, body)", node)
            if not isinstance(args[0], ast.Name):
                raise self.err("summation index must be a name", args[0])
            idx = args[0].id
            if idx == var or idx in outer or idx in F.params:
                raise self.err(f"index {idx!r} is already in use", args[0])
            lo = _int_literal(args[1])
            if lo is None or lo < 0:
                raise self.err("lower bound must be a non-negative integer", args[1])
            off = self.bound(args[2], var)
            body = self.convert(args[3], idx, outer | {var})
            cls = Sum if name == "Sum" else Product
            return cls(idx, lo, var, off, body)
        if name == "Binomial":
            if len(args) != 2:
                raise self.err("Binomial takes (top, bound)", node)
            top = self.convert(args[0], var, outer)
            if not isinstance(top, Rat) or not top.value.is_constant():
                raise self.err("Binomial top must be free of the variable", args[0])
            off = self.bound(args[1], var)
            j = _fresh_index(var, outer, F)
            body = Rat((top.value - F.x + 1) / F.x, j)
            return Product(j, 1, var, off, body)
        if len(args) != 1:
            raise self.err("Factorial takes one bound", node)
        off = self.bound(args[0], var)
        j = _fresh_index(var, outer, F)
        return Product(j, 1, var, off, Rat(F.x, j))


def _fresh_index(var, outer, F):
    for c in ("j", "i", "l", "m", "r", "s", "u", "v", "w"):
        if c != var and c not in outer and c not in F.params and c != TOP:
            return c
    return f"j{len(outer)}"


def _int_literal(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        v = _int_literal(node.operand)
        return -v if v is not None else None
    return None


# -- results ------------------------------------------------------------------------------------

@dataclass
class MappingEntry:
    """One sum or product A_j of the input and its representation a_j."""
    source: str
    element: RingElement
    delta: int


@dataclass
class EARResult:
    input: Expr
    output: Expr
    delta: int
    element: RingElement
    tower: Tower
    context: EvaluationContext
    table: list
    identity: IdentityReport | None = None

    def __str__(self):
        return render(self.output)


@dataclass
class ZeroResult:
    zero: bool
    witness: int | None
    reduction: EARResult

    def __bool__(self):
        return self.zero


# -- session --------------------------------------------------------------------------------------

class Session:
    """A growing RPiSigma-tower with an embedding and a table of known objects.

    Not thread-safe: one caller at a time.
    """

    def __init__(self, F=None, params=(), refined=False, strategy=None):
        self.F = F or Field.get(2, tuple(params))
        self.T = Tower(self.F)
        self.ctx = EvaluationContext.for_tower(self.T)
        self.refined = refined
        self.strategy = strategy
        self.table = {}          # canonical key -> MappingEntry
        self._ev = Evaluator(self.F)
        self._counter = {"y": 0, "p": 0, "s": 0}

    # tower growth
    def _name(self, kind):
        while True:
            self._counter[kind] += 1
            name = f"{kind}{self._counter[kind]}"
            if kind == "y" and self._counter[kind] == 1:
                name = "y"
            if name not in self.T.names and name not in self.F.params and name not in ("x", "z", TOP):
                return name

    def _adjoin(self, kind, data, r=None, c=None, order=None):
        name = self._name({"A": "y", "P": "p", "S": "s"}[kind])
        if kind == "A":
            T = self.T.adjoin_A(name, order, data)
        elif kind == "P":
            T = self.T.adjoin_P(name, data)
        else:
            T = self.T.adjoin_S(name, data)
        T = T.with_status(list(self.T.status) + [VERIFIED])
        self.ctx = extend_context(self.ctx, T, r=r, c=c)
        self.T = T
        log.info("adjoined %s %s", kind, name)
        return T.gen(name)

    def adopt_tower(self, T, choices=None, bindings=None):
        """Start from a hand-made tower (verified here); ``bindings`` maps
        expression texts to (element text, delta)."""
        if self.T.gens:
            raise TowerError("adopt_tower needs a fresh session")
        T2, rep = verify_tower(T)
        if not rep.ok:
            raise UnsupportedInput("supplied tower is not an RPiSigma-extension:\n" + rep.text())
        self.F, self.T = T2.F, T2
        self._ev = Evaluator(self.F)
        self.ctx = EvaluationContext.for_tower(T2, choices)
        for text, (el, delta) in (bindings or {}).items():
            node = parse(text, self.F)
            self.table[self._key(node)] = MappingEntry(text, parse_element(el, T2), delta)
        return rep

    # translation
    def _key(self, node):
        tag = "S" if isinstance(node, Sum) else "P"
        return f"{tag}[{node.lo}|{canonical_string(node.body)}]"

    def element(self, e):
        """(a, delta): ev(a, v) equals e at v for all v >= delta."""
        if isinstance(e, Rat):
            return self.T(e.value), L_ground(e.value)
        if isinstance(e, Add):
            acc, d = self.T.zero, 0
            for t in e.terms:
                a, dt = self.element(t)
                acc, d = acc + a, max(d, dt)
            return acc, d
        if isinstance(e, Mul):
            acc, d = self.T.one, 0
            for t in e.factors:
                a, dt = self.element(t)
                acc, d = acc * a, max(d, dt)
            return acc, d
        if isinstance(e, Pow):
            a, d = self.element(e.base)
            try:
                return a ** e.exp, d
            except TowerError:
                raise UnsupportedInput("negative power of a non-invertible expression") from None
        if isinstance(e, Geo):
            return self._geometric(e.base)
        if isinstance(e, (Sum, Product)):
            key = self._key(e)
            hit = self.table.get(key)
            if hit is None:
                a, d = self._sum(e) if isinstance(e, Sum) else self._product(e)
                hit = MappingEntry(render(_unshifted(e)), a, d)
                self.table[key] = hit
            a, d = self.T.lift(hit.element), hit.delta
            if e.off:
                a = self.T.sigma(a, e.off)
                d = max(0, d - e.off, L_of(self.ctx, a))
            return a, d
        raise TypeError(f"cannot translate {e!r}")

    def _h(self, node, i):
        return self._ev.value(node.body, {node.idx: i})

    # products
    def _geometric(self, b):
        F = self.F
        if b.is_rational() and b.is_constant():
            q = Fraction(str(_as_fraction(b)))
            if q < 0 and q != -1:
                a1, d1 = self._product_rat(F(-1), 1, f"(-1)^{TOP}")
                a2, d2 = self._product_rat(F(-q), 1, f"({-q})^{TOP}")
                return a1 * a2, max(d1, d2)
        return self._product_rat(b, 1, None)

    def _product(self, node):
        if any(isinstance(n, (Sum, Product)) for n in walk(node.body)):
            raise UnsupportedInput("unsupported product: nested products (or sums inside products) "
                                   "need a hand-made tower, see Session.adopt_tower")
        body = node.body
        if isinstance(body, Rat):
            h = body.value
        else:
            try:
                h = _rational_value(body, self.F)
            except ValueError:
                raise UnsupportedInput("unsupported product: the multiplicand must be rational") from None
        return self._product_rat(h, node.lo, None, node)

    def _product_rat(self, h, lo, label, node=None):
        """Element for prod_{i=lo}^k h(i), h in K(x)."""
        F = self.F
        if h.is_zero():
            raise UnsupportedInput("product with zero multiplicand")
        alpha = shift(h, 1)
        if alpha.is_one():
            return self.T.one, max(lo - 1, 0)
        if alpha.is_constant() and not alpha.has_params():
            o = root_of_unity_order(alpha)
            if o is not None:
                return self._root_power(alpha, o, lo)
        res = check_pi_monomial(self.T, self.T(alpha))
        if res.independent:
            base = max(L_of(self.ctx, self.T(alpha)), Z_of(self.ctx, self.T(alpha)))
            r = max(lo, base + 1)
            c = F.one
            for i in range(lo, r):
                c = c * self._hval(h, i)
            if c.is_zero():
                raise UnsupportedInput("product vanishes identically from its lower bound on")
            p = self._adjoin("P", self.T(alpha), r=r, c=c)
            return p, r - 1
        if abs(res.m) != 1:
            raise UnsupportedInput(f"unsupported product: only the power {res.m} of it lies in the tower")
        g = res.g if res.m == 1 else res.g ** -1
        k0 = max(lo, L_of(self.ctx, g), Z_of(self.ctx, g) + 1)
        val = F.one
        for i in range(lo, k0 + 1):
            val = val * self._hval(h, i)
        gv = ev(self.ctx, g, k0)
        if gv.is_zero() or val.is_zero():
            raise UnsupportedInput("product value vanishes at its normalization point")
        return g.scale(val / gv), k0

    def _root_power(self, alpha, order, lo):
        """prod_{i=lo}^k alpha = alpha^(1-lo) * alpha^k through an A-generator."""
        F = self.F
        for i in self.T.a_pos:
            g = self.T.gens[i]
            for j in range(g.order):
                if g.alpha ** j == alpha:
                    d = self.ctx.data[i]
                    # ev(y^j, k) = (c alpha_y^(k-r+1))^j
                    scale = (d.c * g.alpha ** (1 - d.r)) ** j
                    return self.T.gen(i) ** j * (alpha ** (1 - lo) / scale), max(lo - 1, 0)
        res = check_r_monomial(self.T, alpha, order)
        if not res.independent:
            raise UnsupportedInput("root of unity related to earlier ones in an unsupported way")
        y = self._adjoin("A", alpha, r=1, c=F.one, order=order)
        return y * alpha ** (1 - lo), max(lo - 1, 0)

    def _hval(self, h, i):
        d = h.den.subs({"x": i}) if h.den.degrees()[-1] else h.den
        if d.is_zero():
            raise UnsupportedInput(f"multiplicand has a pole at {i}")
        return h.subs_x(i)

    # sums
    def _sum(self, node):
        b1, db = self.element(node.body)
        beta = self.T.sigma(b1)
        # ev(beta, v) = h(v + 1) from max(db - 1, generator bounds of b1) on;
        # the coefficients of sigma(b1) and b1 agree pointwise
        delta = max(node.lo - 1, db - 1, self._gen_bound(b1), L_of(self.ctx, beta))
        g = self._telescope(beta)
        if g is None and self.refined:
            g = self._refined(beta)
        if g is not None:
            g = self.T.lift(g)
            delta = max(delta, L_of(self.ctx, g))
            total = self.F.zero
            for i in range(node.lo, delta + 1):
                total = total + self._h(node, i)
            c = total - ev(self.ctx, g, delta)
            return g + c, delta
        r = delta + 1
        c = self.F.zero
        for i in range(node.lo, r):
            c = c + self._h(node, i)
        s = self._adjoin("S", beta, r=r, c=c)
        return s, r - 1

    def _gen_bound(self, f):
        out = 0
        for e in f.terms:
            for i, v in enumerate(e):
                if v:
                    out = max(out, self.ctx.data[i].L)
        return out

    def _telescope(self, beta, T=None):
        T = T or self.T
        if not beta:
            return T.zero
        for c, g in solve_ptdr(T, [T.lift(beta)], strategy=self.strategy):
            if c[0]:
                return g.scale(self.F.one / c[0])
        return None

    def refined_candidates(self, beta):
        """Summands sigma(y^a / q(x-1)^j) tried as extra sum generators."""
        F = self.F
        fb = _FactorBase(F)
        members = {}
        for c in beta.terms.values():
            if c.den.degrees()[-1] == 0:
                continue
            _, facs = _factor_z_free(c.den)
            for p, e in facs:
                if p.degrees()[-1] == 0:
                    continue
                cls, j = fb.shift_class(p)
                members.setdefault(cls, {})
                members[cls][j] = max(members[cls].get(j, 0), e)
        ypow = [self.T.one]
        for i in self.T.a_pos:
            g = self.T.gens[i]
            ypow += [self.T.gen(i) ** a for a in range(1, g.order)]
        out = []
        for cls, js in sorted(members.items()):
            j0 = min(js)
            q0 = normalize(_shift_poly(F, fb.classes[cls], j0 - 1), F.ctx.constant(1), F)
            for power in range(1, max(js.values()) + 1):
                base = (q0 ** power).inverse()
                for y in ypow:
                    out.append(self.T.sigma(y.scale(base)))
        return out

    def _refined(self, beta):
        for cand in self.refined_candidates(beta):
            if self._telescope(cand) is not None:
                continue
            T1 = self.T.adjoin_S("_cand", cand)
            g = self._telescope(T1.lift(beta), T1)
            if g is None:
                continue
            s = self._adjoin("S", cand)
            log.info("refined telescoping adjoined %s with summand %s", s, render_element(cand))
            return RingElement(self.T, g.terms)
        return None

    # front doors
    def parse(self, text):
        return parse(text, self.F) if isinstance(text, str) else text

    def sigma_reduce(self, expr, check=True, krange=None):
        """EARResult for ``expr`` (text or expression)."""
        e = self.parse(expr)
        b, delta = self.element(e)
        b = self.T.lift(b)
        delta = max(delta, L_of(self.ctx, b))
        out = expr_k(self.ctx, b, TOP)
        table = [MappingEntry(v.source, self.T.lift(v.element), v.delta) for v in self.table.values()]
        res = EARResult(e, out, delta, b, self.T, self.ctx, table)
        if check:
            ks = krange or range(delta, delta + 101)
            res.identity = verify_identity(self.ctx, e, out, ks)
            if not res.identity.ok:
                raise AssertionError(f"reduction failed its identity check: {res.identity}")
        return res

    def is_zero(self, expr, search=200):
        """ZeroResult; a nonzero input comes with some k >= delta where it does not vanish."""
        res = self.sigma_reduce(expr)
        if not res.element:
            return ZeroResult(True, None, res)
        ev_in = Evaluator(self.F)
        for k in range(res.delta, res.delta + search + 1):
            if not ev_in.value(res.input, {TOP: k}).is_zero():
                return ZeroResult(False, k, res)
        raise AssertionError("nonzero reduction but no nonzero value found")

    def telescope(self, expr):
        """g with sigma(g) - g = f for the summand f, as (g element, expression) or None."""
        e = self.parse(expr)
        f, _ = self.element(e)
        g = self._telescope(f)
        if g is None:
            return None
        return g, expr_k(self.ctx, g, TOP)

    def creative(self, expr, param="n", maxorder=10):
        """Creative telescoping for the summand f(param, k) in the shifts param -> param+i-1."""
        e = self.parse(expr)
        if param not in self.F.params:
            raise UnsupportedInput(f"unknown parameter {param!r}")
        fs = []
        for i in range(1, maxorder + 1):
            fi, _ = self.element(substitute_param(e, param, i - 1))
            fs.append(fi)
        fs = [self.T.lift(f) for f in fs]
        return creative_telescope(self.T, fs, cap=maxorder, strategy=self.strategy)

    def independent(self, exprs):
        fs = [self.element(self.parse(x))[0] for x in exprs]
        fs = [self.T.lift(f) for f in fs]
        return certify_independence(self.T, fs, strategy=self.strategy)

    # persistence
    def dumps(self):
        lines = ["[tower]", serialize_tower(self.T).rstrip("\n"), "[context]"]
        for g, d in zip(self.T.gens, self.ctx.data):
            lines.append(f"{g.name} r={d.r} c={_render_k(d.c)} L={d.L}")
        lines.append("[table]")
        for key, v in self.table.items():
            lines.append(f"{v.source}\t{v.delta}\t{render_element(v.element)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text, refined=False, strategy=None):
        sections = {}
        cur = None
        for line in text.splitlines():
            if re.fullmatch(r"\[\w+\]", line.strip()):
                cur = line.strip()[1:-1]
                sections[cur] = []
            elif cur is not None and line.strip():
                sections[cur].append(line)
        T = parse_tower("\n".join(sections.get("tower", [])))
        T = T.with_status([VERIFIED] * len(T.gens))
        s = cls(T.F, refined=refined, strategy=strategy)
        choices = {}
        for line in sections.get("context", []):
            name, *kv = line.split()
            kv = dict(p.split("=", 1) for p in kv)
            choices[name] = (int(kv["r"]), parse_element(kv["c"], T.prefix(0)).ground())
        s.T = T
        s.ctx = EvaluationContext.for_tower(T, choices)
        for name in T.names:
            for kind in ("y", "p", "s"):
                m = re.fullmatch(kind + r"(\d*)", name)
                if m:
                    s._counter[kind] = max(s._counter[kind], int(m.group(1) or 1))
        for line in sections.get("table", []):
            src, delta, el = line.split("\t")
            node = parse(src, s.F)
            s.table[s._key(_unshifted(node))] = MappingEntry(src, parse_element(el, T), int(delta))
        return s


def _render_k(c):
    from .arith import render as rf
    return rf(c).replace(" ", "")


def _unshifted(node):
    """The same sum or product with bound k."""
    return type(node)(node.idx, node.lo, TOP, 0, _tidy(node.body, node.idx))


def _tidy(e, var):
    """``simplify`` applied inside sum and product bodies as well."""
    def go(e):
        if isinstance(e, (Sum, Product)):
            return type(e)(e.idx, e.lo, e.var, e.off, _tidy(e.body, e.idx))
        if isinstance(e, Add):
            return Add(tuple(go(t) for t in e.terms))
        if isinstance(e, Mul):
            return Mul(tuple(go(t) for t in e.factors))
        if isinstance(e, Pow):
            return Pow(go(e.base), e.exp)
        return e
    return simplify(go(e), var)


def _shift_poly(F, P, j):
    if j == 0:
        return P
    g = F.ctx.gens()
    return P.compose(*g[:-1], g[-1] + j)


def _as_fraction(c):
    num = c.num.leading_coefficient() if not c.num.is_zero() else 0
    den = c.den.leading_coefficient()
    return Fraction(int(num), int(den))


def _rational_value(e, F):
    """The K(x) value of an expression built from Rat leaves only."""
    if isinstance(e, Rat):
        return e.value
    if isinstance(e, Add):
        acc = F.zero
        for t in e.terms:
            acc = acc + _rational_value(t, F)
        return acc
    if isinstance(e, Mul):
        acc = F.one
        for t in e.factors:
            acc = acc * _rational_value(t, F)
        return acc
    if isinstance(e, Pow):
        return _rational_value(e.base, F) ** e.exp
    raise ValueError("not rational")


# -- module-level conveniences ----------------------------------------------------------------

def sigma_reduce(expr, refined=False, strategy=None, session=None):
    if session is None:
        names = expression_names(expr) if isinstance(expr, str) else list(field_of(expr).params)
        session = Session(field_of(expr) if isinstance(expr, Expr) else None, names, refined, strategy)
    return session.sigma_reduce(expr)


def is_zero(expr, refined=False, strategy=None, session=None):
    if session is None:
        names = expression_names(expr) if isinstance(expr, str) else list(field_of(expr).params)
        session = Session(field_of(expr) if isinstance(expr, Expr) else None, names, refined, strategy)
    return session.is_zero(expr)
