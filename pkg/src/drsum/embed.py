"""Evaluation of tower elements as sequences.

Ground field: ev(p/q, k) = p(k)/q(k), and 0 at a pole.  The o-function is
L(p/q) = least l >= 0 such that q has no integer root >= l, and the
z-function is Z(f) = L(num*den).  A tower element gets the maximum of the
bounds of its coefficients and of r - 1 for every generator it uses.  A generator t with lower bound r and
initial value c evaluates to

    P/A:  ev(t, k) = c * prod_{i=r}^{k} ev(alpha, i-1)
    S:    ev(t, k) = sum_{i=r}^{k} ev(beta, i-1) + c

(empty products/sums for k < r).  Defaults: r = max(L(alpha), Z(alpha)) + 1
and c = 1 for P/A, r = L(beta) + 1 and c = 0 for S.

An :class:`EvaluationContext` memoizes the generator sequences.  It is the
one mutable object of the library; a context must not be shared between
threads.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import integer_roots, render as render_field, shift, specialize
from .nested import Add, Evaluator, Expr, Geo, Mul, Pow, Product, Rat, Sum, field_of, simplify
from .tower import RingElement

log = logging.getLogger(__name__)


class EmbeddingError(ValueError):
    pass


# -- o- and z-functions on K(x) --------------------------------------------------------

def _root_bound(p):
    if p.is_constant():
        return 0
    roots = integer_roots(p)
    return max(0, max(roots) + 1) if roots else 0


def L_ground(f):
    """o-function of K(x)."""
    if f.is_zero():
        return 0
    return _root_bound(f.denominator())


def Z_ground(f):
    """z-function of K(x)*."""
    if f.is_zero():
        raise EmbeddingError("z-function of zero")
    return _root_bound(f.numerator() * f.denominator())


# -- context -------------------------------------------------------------------------

@dataclass
class GenEmbedding:
    r: int
    c: object          # element of K
    L: int             # o-function value of the generator itself (= r - 1)


@dataclass
class SequenceSlice:
    start: int
    values: list

    def rendered(self):
        return [render_field(v) for v in self.values]


class EvaluationContext:
    """Defining function ev with o-function L and z-function Z for a tower.

    ``params`` (name -> rational) specializes the parameters of K; without it
    values are exact elements of K.
    """

    def __init__(self, T, data=(), params=None):
        self.T = T
        self.data = list(data)
        self.params = {k: Fraction(v) for k, v in (params or {}).items()}
        self._seq = [[] for _ in self.data]
        if len(self.data) > len(T.gens):
            raise EmbeddingError("more embedding data than generators")

    # construction
    @classmethod
    def ground(cls, T, params=None):
        return cls(T.prefix(0) if len(T.gens) else T, (), params)

    @classmethod
    def for_tower(cls, T, choices=None, params=None):
        """Context for all generators of T; ``choices`` maps names to (r, c)."""
        choices = choices or {}
        ctx = cls(T.prefix(0), (), params)
        for i, g in enumerate(T.gens):
            r, c = choices.get(g.name, (None, None))
            ctx = extend_context(ctx, T.prefix(i + 1), r=r, c=c)
        return ctx

    def with_params(self, params):
        return EvaluationContext(self.T, self.data, params)

    @property
    def F(self):
        return self.T.F

    # ground evaluation
    def ground_value(self, f, k):
        if f.is_zero():
            return f
        d = f.den.subs({"x": k}) if f.den.degrees()[-1] else f.den
        if d.is_zero():
            return self.F.zero
        v = f.subs_x(k)
        if self.params:
            try:
                v = specialize(v, self.params)
            except ZeroDivisionError:
                raise EmbeddingError(f"parameter values {self.params} hit a pole at k={k}") from None
        return v

    def gen_value(self, i, k):
        seq = self._seq[i]
        if len(seq) > k:
            return seq[k]
        g = self.T.gens[i]
        d = self.data[i]
        while len(seq) <= k:
            j = len(seq)
            if j < d.r:
                seq.append(self._spec(d.c))
                continue
            if g.kind == "S":
                seq.append(seq[-1] + self._eval(g.beta, j - 1, i))
            elif g.kind == "P":
                seq.append(seq[-1] * self._eval(g.alpha, j - 1, i))
            else:
                seq.append(seq[-1] * self._spec(g.alpha))
        return seq[k]

    def _spec(self, c):
        if self.params and c.has_params():
            return specialize(c, self.params)
        return c

    def _eval(self, f, k, upto):
        acc = self.F.zero
        for e, c in f.terms.items():
            v = self.ground_value(c, k)
            if v.is_zero():
                continue
            for i, ex in enumerate(e):
                if ex:
                    if i >= upto:
                        raise EmbeddingError("element uses a generator without embedding data")
                    t = self.gen_value(i, k)
                    if ex < 0 and t.is_zero():
                        raise EmbeddingError(f"generator {self.T.gens[i].name} vanishes at k={k}")
                    v = v * t ** ex
            acc = acc + v
        return acc

    def __repr__(self):
        rows = ", ".join(f"{g.name}: r={d.r} c={render_field(d.c)}" for g, d in zip(self.T.gens, self.data))
        return f"EvaluationContext({rows})"


def _as_element(ctx, f):
    T = ctx.T
    if isinstance(f, RingElement):
        if f.T is T or f.T.compatible(T):
            return RingElement(T, f.terms) if f.T is not T else f
        return T.lift(f)
    return T(f)


def extend_context(ctx, T_new, r=None, c=None):
    """Context for ``T_new`` = ctx.T plus one generator."""
    n = len(ctx.data)
    if len(T_new.gens) != n + 1:
        raise EmbeddingError("extend_context adds exactly one generator")
    g = T_new.gens[n]
    F = T_new.F
    if g.kind == "S":
        base = L_of(ctx, g.beta)
        r = base + 1 if r is None else r
        if r <= base:
            raise EmbeddingError(f"lower bound r={r} must exceed L(beta)={base}")
        c = F.zero if c is None else F(c)
    else:
        if g.kind == "P":
            base = max(L_of(ctx, g.alpha), Z_of(ctx, g.alpha))
        else:
            base = 0
        r = base + 1 if r is None else r
        if r <= base:
            raise EmbeddingError(f"lower bound r={r} must exceed max(L, Z)={base}")
        c = F.one if c is None else F(c)
        if c.is_zero():
            raise EmbeddingError("initial value of a product generator must be nonzero")
        if g.kind == "A" and not (c ** g.order).is_one():
            raise EmbeddingError(f"initial value c must satisfy c^{g.order} = 1")
    if not c.is_constant():
        raise EmbeddingError("initial value must lie in K")
    new = EvaluationContext(T_new, ctx.data + [GenEmbedding(r, c, r - 1)], ctx.params)
    new._seq[:n] = ctx._seq[:n]
    return new


def L_of(ctx, f):
    """o-function: max of the coefficient bounds and r - 1 for each generator used.

    The defining recurrences of a generator already hold from k = r - 1 on,
    so r - 1 (rather than r) is a valid bound.
    """
    f = f if isinstance(f, RingElement) else ctx.T(f)
    out = 0
    for e, c in f.terms.items():
        out = max(out, L_ground(c))
        for i, ex in enumerate(e):
            if ex:
                if i >= len(ctx.data):
                    raise EmbeddingError(f"generator {f.T.gens[i].name} has no embedding data")
                out = max(out, ctx.data[i].L)
    return out


def Z_of(ctx, f):
    """z-function on units of the shape w * monomial (w in K(x)*)."""
    f = f if isinstance(f, RingElement) else ctx.T(f)
    if len(f.terms) != 1:
        raise EmbeddingError("z-function defined for unit monomials only")
    (e, c), = f.terms.items()
    for i, ex in enumerate(e):
        if ex and f.T.gens[i].kind == "S":
            raise EmbeddingError("z-function defined for unit monomials only")
    return Z_ground(c)


def evaluate(ctx, f, k, params=None):
    """ev(f, k).  Below L(f) the value follows the 0-at-pole convention."""
    if params is not None and dict(params) != ctx.params:
        ctx = ctx.with_params(params)
    if k < 0:
        raise EmbeddingError("evaluation index must be non-negative")
    f = _as_element(ctx, f)
    return ctx._eval(f, k, len(ctx.data))


def evaluate_range(ctx, f, ks):
    f = _as_element(ctx, f)
    return [ctx._eval(f, k, len(ctx.data)) for k in ks]


def slice_of(ctx, f, start, stop):
    return SequenceSlice(start, evaluate_range(ctx, f, range(start, stop)))


def dump_csv(ctx, f, ks, out=None):
    """Write ``k,value`` rows; returns the text when ``out`` is None."""
    buf = out or io.StringIO()
    w = csv.writer(buf)
    w.writerow(["k", "value"])
    for k, v in zip(ks, evaluate_range(ctx, f, ks)):
        w.writerow([k, render_field(v)])
    return buf.getvalue() if out is None else None


# -- induced expressions ------------------------------------------------------------

_INDEX_NAMES = ("i", "j", "l", "m", "q", "u", "w")


def _fresh(depth, avoid):
    names = [v for v in _INDEX_NAMES if v not in avoid]
    if depth < len(names):
        return names[depth]
    return f"i{depth}"


class _Builder:
    def __init__(self, ctx, var):
        self.ctx = ctx
        self.var = var
        self.avoid = set(ctx.F.params) | {var}
        self.F = ctx.F

    def element(self, f, v, off, depth):
        terms = []
        for e, c in sorted(f.terms.items()):
            cc = shift(c, off)
            factors = [Rat(cc, None if cc.is_constant() else v)]
            for i, ex in enumerate(e):
                if ex:
                    t = self.gen(i, v, off, depth)
                    factors.append(t if ex == 1 else Pow(t, ex))
            terms.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
        if not terms:
            return Rat(self.F.zero, None)
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def gen(self, i, v, off, depth):
        g = self.ctx.T.gens[i]
        d = self.ctx.data[i]
        if g.kind == "A":
            scale = d.c * g.alpha ** (off - d.r + 1)
            return Mul((Rat(scale, None), Geo(g.alpha, v)))
        if g.kind == "P" and g.alpha.is_constant():
            a = g.alpha.ground()
            return Mul((Rat(d.c * a ** (off - d.r + 1), None), Geo(a, v)))
        # bodies use sigma^-1 of the data at the running index; the rational
        # parts agree pointwise and the generators are used at i - 1 >= r_j - 1
        idx = _fresh(depth, self.avoid)
        T = self.ctx.T.prefix(i)
        if g.kind == "P":
            body = self.element(T.sigma(g.alpha, -1), idx, 0, depth + 1)
            node = Product(idx, d.r, v, off, simplify(body, idx))
            return node if d.c.is_one() else Mul((Rat(d.c, None), node))
        body = self.element(T.sigma(g.beta, -1), idx, 0, depth + 1)
        node = Sum(idx, d.r, v, off, simplify(body, idx))
        return node if d.c.is_zero() else Add((node, Rat(d.c, None)))


def expr_k(ctx, f, var="k"):
    """The ev-induced nested expression of f in the variable ``var``."""
    f = _as_element(ctx, f)
    raw = _Builder(ctx, var).element(f, var, 0, 0)
    return simplify(raw, var)


# -- identity checks -------------------------------------------------------------------

@dataclass
class IdentityReport:
    ok: bool
    checked: int = 0
    samples: list = field(default_factory=list)
    mismatch: tuple | None = None   # (k, params, lhs value, rhs value)

    def __str__(self):
        if self.ok:
            return f"agree on {self.checked} points"
        k, p, a, b = self.mismatch
        return f"mismatch at k={k} params={p}: {render_field(a)} != {render_field(b)}"


_SAMPLE_CANDIDATES = (1, 5, 10, 2, 3, 7, 11, 13, 17, 19, 23)


def _evaluator_for(ctx, side, params):
    if isinstance(side, Expr):
        ev = Evaluator(field_of(side), params)
        return (lambda k: ev.value(side, {"k": k})), 0
    c = ctx.with_params(params) if params else EvaluationContext(ctx.T, ctx.data, None)
    f = _as_element(c, side)
    return (lambda k: c._eval(f, k, len(c.data))), L_of(c, f)


def verify_identity(ctx, lhs, rhs, krange=range(0, 101), params=None):
    """Exact comparison of two sides (tower elements or expressions) on a grid.

    ``params`` is a list of parameter assignments; by default up to three
    sample points are chosen, skipping any that hit a pole.
    """
    F = ctx.F if ctx is not None else field_of(lhs if isinstance(lhs, Expr) else rhs)
    samples = list(params) if params is not None else None
    if samples is None:
        samples = [{}] if not F.params else _default_samples(F, 3)
    rep = IdentityReport(True)
    for p in samples:
        try:
            a, la = _evaluator_for(ctx, lhs, p)
            b, lb = _evaluator_for(ctx, rhs, p)
            lo = max(la, lb)
            for k in krange:
                if k < lo:
                    continue
                va, vb = a(k), b(k)
                rep.checked += 1
                if va != vb:
                    rep.ok = False
                    rep.mismatch = (k, p, va, vb)
                    return rep
        except EmbeddingError as exc:
            if params is not None:
                raise
            log.info("skipping parameter sample %s: %s", p, exc)
            continue
        rep.samples.append(p)
    return rep


def _default_samples(F, count):
    out = []
    for v in _SAMPLE_CANDIDATES:
        out.append({name: Fraction(v + j) for j, name in enumerate(F.params)})
        if len(out) == count:
            break
    return out
