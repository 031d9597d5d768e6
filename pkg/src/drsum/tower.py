"""Towers of A-, P- and S-extensions over K(x) and their elements.

A tower ``F<t_1>...<t_e>`` is a ground field K(x) with sigma(x) = x + step
together with an ordered list of generators:

* ``A`` (root of unity): sigma(y) = alpha*y, alpha in K, y^order = 1;
* ``P`` (product): sigma(p) = alpha*p, alpha a unit monomial of the tower below;
* ``S`` (sum): sigma(s) = s + beta, beta any element of the tower below.

Elements are sparse maps from exponent vectors to coefficients in K(x)
(Laurent in P-generators, reduced mod the order in A-generators).

>>> from drsum.arith import Field
>>> F = Field.get(2, ("n",))
>>> x = F.x
>>> T = Tower(F).adjoin_A("y", 2, F(-1))
>>> y = T.gen("y")
>>> (1 - y) * (1 + y)
0
"""

from __future__ import annotations

import ast
from fractions import Fraction

from .arith import Field, GroundFieldElement, render as render_field

UNVERIFIED, VERIFIED, REFUTED = "unverified", "verified", "refuted"


class TowerError(Exception):
    pass


class Generator:
    """One generator of a tower.  ``alpha``/``beta`` live in the tower below."""

    __slots__ = ("name", "kind", "order", "alpha", "beta")

    def __init__(self, name, kind, alpha=None, beta=None, order=None):
        if kind not in ("A", "P", "S"):
            raise ValueError(f"unknown generator kind {kind!r}")
        self.name, self.kind, self.order = name, kind, order
        self.alpha, self.beta = alpha, beta

    def __repr__(self):
        if self.kind == "A":
            return f"A {self.name} order={self.order} alpha={render_field(self.alpha)}"
        if self.kind == "P":
            return f"P {self.name} alpha={self.alpha}"
        return f"S {self.name} beta={self.beta}"


class Tower:
    """An immutable tower of generators over K(x)."""

    def __init__(self, F, gens=(), step=1, status=None):
        self.F = F
        self.gens = tuple(gens)
        self.step = step
        self.status = tuple(status) if status is not None else (UNVERIFIED,) * len(self.gens)
        self.names = tuple(g.name for g in self.gens)
        self._index = {g.name: i for i, g in enumerate(self.gens)}
        self.a_pos = [i for i, g in enumerate(self.gens) if g.kind == "A"]
        self._orders = tuple(g.order if g.kind == "A" else 0 for g in self.gens)
        self._prefix = {}
        self._sig_pow = {}
        self._sig_inv_pow = {}
        self._sig_inv_alpha = {}
        self.zero = RingElement(self, {})
        self.one = RingElement(self, {self.zero_exp: F.one})

    # -- structure ----------------------------------------------------------
    @property
    def zero_exp(self):
        return (0,) * len(self.gens)

    def __len__(self):
        return len(self.gens)

    def key(self):
        return (self.F, self.step, tuple(id(g) for g in self.gens))

    def compatible(self, other):
        return self is other or self.key() == other.key()

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise TowerError(f"unknown generator {name!r}") from None

    def gen(self, name):
        i = self.index(name) if isinstance(name, str) else name
        e = [0] * len(self.gens)
        e[i] = 1
        return RingElement(self, {tuple(e): self.F.one})

    def monomial(self, exps, coeff=None):
        return RingElement(self, {self._fold(tuple(exps)): coeff if coeff is not None else self.F.one})

    def prefix(self, i):
        """The tower of the first i generators."""
        if i == len(self.gens):
            return self
        t = self._prefix.get(i)
        if t is None:
            t = Tower(self.F, self.gens[:i], self.step, self.status[:i])
            self._prefix[i] = t
        return t

    def is_prefix_of(self, other):
        return (self.F is other.F and self.step == other.step and len(self.gens) <= len(other.gens)
                and all(a is b for a, b in zip(self.gens, other.gens)))

    def __call__(self, v):
        if isinstance(v, RingElement):
            return self.lift(v)
        if isinstance(v, (int, Fraction)):
            v = self.F(v)
        if isinstance(v, GroundFieldElement):
            return RingElement(self, {self.zero_exp: v} if v else {})
        raise TypeError(f"cannot coerce {type(v).__name__} into a tower element")

    def lift(self, e):
        """Embed an element of a prefix tower."""
        if e.T is self or e.T.compatible(self):
            return e if e.T is self else RingElement(self, e.terms)
        if not e.T.is_prefix_of(self):
            raise TowerError("element does not belong to a sub-tower")
        pad = (0,) * (len(self.gens) - len(e.T.gens))
        return RingElement(self, {k + pad: v for k, v in e.terms.items()})

    def _fold(self, e):
        if not self.a_pos:
            return e
        o = self._orders
        return tuple(v % o[i] if o[i] else v for i, v in enumerate(e))

    def __repr__(self):
        body = "".join(f"<{g.name}>" if g.kind == "P" else f"[{g.name}]" for g in self.gens)
        return f"Tower(K(x){body}, step={self.step})"

    # -- extension ------------------------------------------------------------
    def _extend(self, g):
        if g.name in self._index or g.name in ("x", "z") or g.name in self.F.params:
            raise TowerError(f"name {g.name!r} already in use")
        return Tower(self.F, self.gens + (g,), self.step, self.status + (UNVERIFIED,))

    def adjoin_A(self, name, order, alpha):
        alpha = self.F(alpha)
        if not alpha.is_constant():
            raise TowerError("A-multiplicand must lie in K")
        if not (alpha ** order).is_one():
            raise TowerError(f"alpha is not a root of unity of order {order}")
        if self.F.m % order and not (order == 2 and self.F.m == 1):
            raise TowerError(f"order {order} does not divide the cyclotomic order {self.F.m}")
        return self._extend(Generator(name, "A", alpha=alpha, order=order))

    def adjoin_P(self, name, alpha):
        alpha = self(alpha) if not isinstance(alpha, RingElement) else self.lift(alpha)
        if len(alpha.terms) != 1:
            raise TowerError("reordering requires basic extension: P-multiplicand must be a unit monomial")
        (e, c), = alpha.terms.items()
        for i, g in enumerate(self.gens):
            if e[i] and g.kind != "P":
                raise TowerError("reordering requires basic extension: P-multiplicand must be free of A/S-generators")
        return self._extend(Generator(name, "P", alpha=alpha))

    def adjoin_S(self, name, beta):
        beta = self(beta) if not isinstance(beta, RingElement) else self.lift(beta)
        return self._extend(Generator(name, "S", beta=beta))

    def with_status(self, status):
        t = Tower(self.F, self.gens, self.step, status)
        return t

    def is_verified(self, upto=None):
        n = len(self.gens) if upto is None else upto
        return all(s == VERIFIED for s in self.status[:n])

    def to_field(self, G):
        """The same tower over a superfield G."""
        if G is self.F:
            return self
        T = Tower(G, (), self.step)
        for g in self.gens:
            if g.kind == "A":
                T = T.adjoin_A(g.name, g.order, g.alpha.to_field(G))
            elif g.kind == "P":
                T = T.adjoin_P(g.name, g.alpha.to_field(T))
            else:
                T = T.adjoin_S(g.name, g.beta.to_field(T))
        return T.with_status(self.status)

    # -- sigma ------------------------------------------------------------------
    def _sigma_pow(self, i, k):
        """sigma(t_i)^k, stored as ("mono", coeff, exps) or ("poly", element)."""
        key = (i, k)
        r = self._sig_pow.get(key)
        if r is not None:
            return r
        g = self.gens[i]
        if g.kind == "A":
            e = [0] * len(self.gens)
            r = ("mono", g.alpha ** k, tuple(e))
        elif g.kind == "P":
            (ae, ac), = g.alpha.terms.items()
            ac = ac.shift(0)
            pad = (0,) * (len(self.gens) - len(ae))
            r = ("mono", ac ** k, tuple(v * k for v in ae + pad))
        else:
            base = self.gen(i) + self.lift(g.beta)
            r = ("poly", base ** k)
        self._sig_pow[key] = r
        return r

    def _sigma_inv_alpha(self, i):
        r = self._sig_inv_alpha.get(i)
        if r is None:
            g = self.gens[i]
            sub = self.prefix(i)
            if g.kind == "A":
                r = g.alpha.inverse()
            elif g.kind == "P":
                r = sub.sigma(g.alpha, -1)
            else:
                r = sub.sigma(g.beta, -1)
            self._sig_inv_alpha[i] = r
        return r

    def _sigma_inv_pow(self, i, k):
        key = (i, k)
        r = self._sig_inv_pow.get(key)
        if r is not None:
            return r
        g = self.gens[i]
        if g.kind == "A":
            r = ("mono", self._sigma_inv_alpha(i) ** k, self.zero_exp)
        elif g.kind == "P":
            (ae, ac), = self._sigma_inv_alpha(i).terms.items()
            pad = (0,) * (len(self.gens) - len(ae))
            r = ("mono", ac ** (-k), tuple(-v * k for v in ae + pad))
        else:
            base = self.gen(i) - self.lift(self._sigma_inv_alpha(i))
            r = ("poly", base ** k)
        self._sig_inv_pow[key] = r
        return r

    def _sigma_once(self, f, inverse=False):
        if f.T is not self:
            f = self.lift(f)
        h = -self.step if inverse else self.step
        powf = self._sigma_inv_pow if inverse else self._sigma_pow
        out = {}
        polys = []
        for e, c in f.terms.items():
            coeff = c.shift(h)
            shift_e = [0] * len(e)
            parts = []
            for i, k in enumerate(e):
                if k == 0:
                    continue
                r = powf(i, k)
                if r[0] == "mono":
                    coeff = coeff * r[1]
                    shift_e = [a + b for a, b in zip(shift_e, r[2])]
                    shift_e[i] += k
                else:
                    parts.append(r[1])
            if not parts:
                _acc(out, self._fold(tuple(shift_e)), coeff)
            else:
                p = parts[0]
                for q in parts[1:]:
                    p = p * q
                polys.append(p * RingElement(self, {self._fold(tuple(shift_e)): coeff}))
        res = RingElement(self, {k: v for k, v in out.items() if v})
        for p in polys:
            res = res + p
        return res

    def sigma(self, f, j=1):
        """sigma^j(f)."""
        if not isinstance(f, RingElement):
            f = self(f)
        for _ in range(abs(j)):
            f = self._sigma_once(f, inverse=j < 0)
        if j == 0 and f.T is not self:
            f = self.lift(f)
        return f

    # -- A-specialization -----------------------------------------------------
    def a_points(self):
        """All assignments of the A-generators to values alpha_i^u (u < order)."""
        pts = [()]
        for i in self.a_pos:
            g = self.gens[i]
            pts = [p + ((i, u),) for p in pts for u in range(g.order)]
        return pts

    def specialize_a(self, f, point):
        """Image of f under y_i -> alpha_i^u_i (A exponents become zero)."""
        vals = {i: self.gens[i].alpha ** u for i, u in point}
        out = {}
        for e, c in f.terms.items():
            v = c
            ne = list(e)
            for i, val in vals.items():
                if e[i]:
                    v = v * val ** e[i]
                    ne[i] = 0
            _acc(out, tuple(ne), v)
        return RingElement(self, {k: v for k, v in out.items() if v})


def _acc(d, k, v):
    if k in d:
        d[k] = d[k] + v
    else:
        d[k] = v


class RingElement:
    """An element of a tower; immutable, canonical."""

    __slots__ = ("T", "terms", "_h")

    def __init__(self, T, terms):
        self.T = T
        self.terms = terms
        self._h = None

    # -- predicates -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        """True for elements of K."""
        if not self.terms:
            return True
        if len(self.terms) > 1:
            return False
        (e, c), = self.terms.items()
        return not any(e) and c.is_constant()

    def in_ground(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def ground(self):
        """The coefficient of the trivial monomial."""
        return self.terms.get(self.T.zero_exp, self.T.F.zero)

    def coeff(self, exps):
        return self.terms.get(tuple(exps), self.T.F.zero)

    def degree(self, i):
        if isinstance(i, str):
            i = self.T.index(i)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def low_degree(self, i):
        if isinstance(i, str):
            i = self.T.index(i)
        return min(e[i] for e in self.terms)

    def free_of(self, i):
        if isinstance(i, str):
            i = self.T.index(i)
        return all(e[i] == 0 for e in self.terms)

    def support(self, i):
        return sorted({e[i] for e in self.terms})

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, o):
        if isinstance(o, RingElement):
            if o.T is self.T:
                return o
            if o.T.compatible(self.T) or o.T.is_prefix_of(self.T):
                return self.T.lift(o)
            if self.T.is_prefix_of(o.T):
                return None
            raise TowerError("elements of unrelated towers")
        if isinstance(o, (int, Fraction, GroundFieldElement)):
            return self.T(o)
        return NotImplemented

    def __add__(self, o):
        o2 = self._coerce(o)
        if o2 is NotImplemented:
            return NotImplemented
        if o2 is None:
            return o.T.lift(self) + o
        if not o2.terms:
            return self
        if not self.terms:
            return o2
        d = dict(self.terms)
        for k, v in o2.terms.items():
            if k in d:
                s = d[k] + v
                if s:
                    d[k] = s
                else:
                    del d[k]
            else:
                d[k] = v
        return RingElement(self.T, d)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.T, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        o2 = self._coerce(o)
        if o2 is NotImplemented:
            return NotImplemented
        if o2 is None:
            return o.T.lift(self) - o
        return self + (-o2)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o2 = self._coerce(o)
        if o2 is NotImplemented:
            return NotImplemented
        if o2 is None:
            return o.T.lift(self) * o
        if not self.terms or not o2.terms:
            return self.T.zero
        T = self.T
        d = {}
        fold = T._fold if T.a_pos else None
        for k1, v1 in self.terms.items():
            for k2, v2 in o2.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                if fold:
                    k = fold(k)
                _acc(d, k, v1 * v2)
        return RingElement(T, {k: v for k, v in d.items() if v})

    __rmul__ = __mul__

    def scale(self, c):
        """Multiply by an element of K(x)."""
        if not c:
            return self.T.zero
        return RingElement(self.T, {k: v * c for k, v in self.terms.items()})

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction, GroundFieldElement)):
            return self.scale(self.T.F(o).inverse())
        if isinstance(o, RingElement):
            ok, inv = is_unit(self.T, o, check_verified=False) if o.T is self.T else is_unit(
                self.T, self.T.lift(o), check_verified=False)
            if not ok:
                raise TowerError("non-invertible element")
            return self * inv
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            ok, inv = is_unit(self.T, self, check_verified=False)
            if not ok:
                raise TowerError("non-invertible element")
            return inv ** (-k)
        out = self.T.one
        base = self
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            return RingElement(self.T, {self.T._fold(tuple(v * k for v in e)): c ** k})
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, GroundFieldElement)):
            o = self.T(o)
        if not isinstance(o, RingElement):
            return NotImplemented
        if o.T is not self.T:
            if o.T.compatible(self.T) or o.T.is_prefix_of(self.T):
                o = self.T.lift(o)
            elif self.T.is_prefix_of(o.T):
                return o.T.lift(self) == o
            else:
                return False
        return self.terms == o.terms

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self.terms.items()))
        return self._h

    # -- structure ------------------------------------------------------------
    def map_coeffs(self, fn):
        d = {}
        for k, v in self.terms.items():
            w = fn(v)
            if w:
                d[k] = w
        return RingElement(self.T, d)

    def top_coeffs(self):
        """{e: coefficient} w.r.t. the last generator, coefficients in the tower below."""
        n = len(self.T.gens)
        sub = self.T.prefix(n - 1)
        buckets = {}
        for k, v in self.terms.items():
            buckets.setdefault(k[-1], {})[k[:-1]] = v
        return {e: RingElement(sub, d) for e, d in buckets.items()}

    def coeffs_in(self, i):
        """{e: coefficient} w.r.t. generator i (coefficients stay in this tower)."""
        buckets = {}
        for k, v in self.terms.items():
            nk = k[:i] + (0,) + k[i + 1:]
            buckets.setdefault(k[i], {})[nk] = v
        return {e: RingElement(self.T, d) for e, d in buckets.items()}

    def drop_to(self, sub):
        """View as an element of the prefix tower ``sub`` (must be free of the rest)."""
        m = len(sub.gens)
        d = {}
        for k, v in self.terms.items():
            if any(k[m:]):
                raise TowerError("element depends on generators outside the sub-tower")
            d[k[:m]] = v
        return RingElement(sub, d)

    def min_tower_len(self):
        m = 0
        for k in self.terms:
            for i in range(len(k) - 1, -1, -1):
                if k[i]:
                    m = max(m, i + 1)
                    break
        return m

    def to_field(self, T2):
        """The same element in a tower over a superfield (same generator names)."""
        G = T2.F
        d = {}
        for k, v in self.terms.items():
            d[k] = v.to_field(G)
        return T2.lift(RingElement(T2.prefix(len(self.T.gens)), d))

    def __repr__(self):
        return render(self)

    __str__ = __repr__


# -- module-level operations ----------------------------------------------------

def apply_sigma(T, f, j=1):
    """sigma^j(f) in tower T."""
    return T.sigma(f, j)


def _unit_monomial_inverse(T, f):
    if len(f.terms) != 1:
        return None
    (e, c), = f.terms.items()
    if not c:
        return None
    for i, g in enumerate(T.gens):
        if g.kind == "S" and e[i]:
            return None
    return RingElement(T, {T._fold(tuple(-v for v in e)): c.inverse()})


def is_unit(T, f, check_verified=True):
    """(True, inverse) if f is a unit of T, else (False, None)."""
    if check_verified and not T.is_verified():
        raise TowerError("verify tower first")
    if f.T is not T:
        f = T.lift(f)
    if not f.terms:
        return False, None
    inv = _unit_monomial_inverse(T, f)
    if inv is not None:
        return True, inv
    if not T.a_pos:
        return False, None
    # split along the idempotents of the A-part
    from .interlace import a_idempotent
    total = T.zero
    for pt in T.a_points():
        img = T.specialize_a(f, pt)
        inv = _unit_monomial_inverse(T, img)
        if inv is None:
            return False, None
        total = total + a_idempotent(T, pt) * inv
    return True, total


def is_zero_divisor(T, f):
    """True iff f annihilates some nonzero element (0 counts as a zero divisor)."""
    if len(T.a_pos) > 1:
        raise TowerError("several A-generators: merge them first")
    if f.T is not T:
        f = T.lift(f)
    if not f.terms:
        return True
    return any(not T.specialize_a(f, pt).terms for pt in T.a_points())


# -- reordering -------------------------------------------------------------------

def _depths(T):
    depth = []
    for i, g in enumerate(T.gens):
        if g.kind == "A":
            depth.append(0)
            continue
        data = g.alpha if g.kind == "P" else g.beta
        d = 1
        for e in data.terms:
            for j, v in enumerate(e):
                if v and T.gens[j].kind == g.kind:
                    d = max(d, depth[j] + 1)
        depth.append(d)
    return depth


def reorder(T, target="PAS"):
    """Reorder a basic tower; returns (new tower, forward map, backward map).

    Targets: ``"APS"`` (A, then P, then S), ``"PAS"`` (P, A, S) and
    ``"depth"`` (PAS with P- and S-blocks sorted by nesting depth).
    """
    for g in T.gens:
        if g.kind == "P":
            (e, _), = g.alpha.terms.items()
            if any(v and T.gens[j].kind != "P" for j, v in enumerate(e)):
                raise TowerError("reordering requires basic extension")
    idx = list(range(len(T.gens)))
    rank = {"APS": {"A": 0, "P": 1, "S": 2}, "PAS": {"P": 0, "A": 1, "S": 2},
            "depth": {"P": 0, "A": 1, "S": 2}}[target]
    if target == "depth":
        dep = _depths(T)
        perm = sorted(idx, key=lambda i: (rank[T.gens[i].kind], dep[i], i))
    else:
        perm = sorted(idx, key=lambda i: (rank[T.gens[i].kind], i))
    # perm[new] = old
    inv = [0] * len(perm)
    for new, old in enumerate(perm):
        inv[old] = new
    for new, old in enumerate(perm):
        g = T.gens[old]
        data = g.alpha if g.kind == "P" else g.beta if g.kind == "S" else None
        if data is not None:
            for e in data.terms:
                for j, v in enumerate(e):
                    if v and inv[j] >= new:
                        raise TowerError("reordering violates generator dependencies")
    T2 = Tower(T.F, (), T.step)
    status = []
    for new, old in enumerate(perm):
        g = T.gens[old]
        if g.kind == "A":
            T2 = T2.adjoin_A(g.name, g.order, g.alpha)
        else:
            data = g.alpha if g.kind == "P" else g.beta
            full = T.lift(data)
            moved = {tuple(k[perm[i]] for i in range(new)): v for k, v in full.terms.items()}
            el = RingElement(T2, moved)
            T2 = T2.adjoin_P(g.name, el) if g.kind == "P" else T2.adjoin_S(g.name, el)
        status.append(T.status[old])
    T2 = T2.with_status(status)

    def forward(f):
        f = T.lift(f)
        return RingElement(T2, {tuple(k[perm[i]] for i in range(len(perm))): v for k, v in f.terms.items()})

    def backward(f):
        f = T2.lift(f)
        return RingElement(T, {tuple(k[inv[i]] for i in range(len(perm))): v for k, v in f.terms.items()})

    return T2, forward, backward


# -- text format ------------------------------------------------------------------

def _render_coeff(c):
    s = render_field(c)
    if len(c.num.monoms()) > 1 and c.den.is_one():
        s = f"({s})"
    return s


def render(f):
    """Canonical text of a tower element."""
    if not f.terms:
        return "0"
    T = f.T
    parts = []
    for k in sorted(f.terms, key=lambda e: tuple(-v for v in e), reverse=False):
        c = f.terms[k]
        mono = []
        for i, v in enumerate(k):
            if v == 1:
                mono.append(T.names[i])
            elif v:
                mono.append(f"{T.names[i]}^{v}" if v > 0 else f"{T.names[i]}^({v})")
        if not mono:
            parts.append(_render_coeff(c))
        elif c.is_one():
            parts.append("*".join(mono))
        elif (-c).is_one():
            parts.append("-" + "*".join(mono))
        else:
            parts.append(_render_coeff(c) + "*" + "*".join(mono))
    s = " + ".join(parts)
    return s.replace("+ -", "- ")


class _Eval(ast.NodeVisitor):
    def __init__(self, T, extra=None):
        self.T = T
        self.extra = extra or {}

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        if isinstance(node.value, int):
            return self.T(node.value)
        raise SyntaxError(f"unsupported literal {node.value!r}")

    def visit_Name(self, node):
        n = node.id
        T = self.T
        if n in self.extra:
            return self.extra[n]
        if n == "x":
            return T(T.F.x)
        if n == "z":
            return T(T.F.zeta)
        if n in T.F.params:
            return T(T.F.param(n))
        if n in T.names:
            return T.gen(n)
        raise SyntaxError(f"unknown name {n!r}")

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise SyntaxError("unsupported unary operator")

    def visit_BinOp(self, node):
        a = self.visit(node.left)
        if isinstance(node.op, ast.Pow):
            e = node.right
            sign = 1
            if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                sign, e = -1, e.operand
            if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                raise SyntaxError("exponents must be integer literals")
            return a ** (sign * e.value)
        b = self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if b.in_ground():
                return a.scale(b.ground().inverse())
            return a / b
        raise SyntaxError("unsupported operator")

    def generic_visit(self, node):
        raise SyntaxError(f"unsupported syntax: {type(node).__name__}")


def parse_element(text, T):
    """Parse the canonical element syntax (``^`` or ``**`` for powers)."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    return _Eval(T).visit(tree)


def serialize_tower(T):
    """Line-oriented text: a field header, then one generator per line."""
    lines = [f"field m={T.F.m} params={','.join(T.F.params)}"]
    if T.step != 1:
        lines[0] += f" step={T.step}"
    for i, g in enumerate(T.gens):
        if g.kind == "A":
            lines.append(f"A {g.name} order={g.order} alpha={render_field(g.alpha)}")
        elif g.kind == "P":
            lines.append(f"P {g.name} alpha={render(g.alpha)}")
        else:
            lines.append(f"S {g.name} beta={render(g.beta)}")
    return "\n".join(lines) + "\n"


def parse_tower(text, field=None):
    """Inverse of :func:`serialize_tower`.  Lines starting with # are comments."""
    T = None
    pending = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("field"):
            kv = dict(p.split("=", 1) for p in line.split()[1:])
            params = tuple(p for p in kv.get("params", "").split(",") if p)
            F = Field.get(int(kv.get("m", 2)), params)
            T = Tower(F, (), int(kv.get("step", 1)))
            continue
        pending.append(line)
    if T is None:
        T = Tower(field or Field.get(2, ()))
    orders = [int(l.split("order=")[1].split()[0]) for l in pending if l.startswith("A ")]
    if orders and T.F.m % _lcm(orders) and not all(o <= 2 for o in orders):
        T = Tower(T.F.superfield(_lcm(orders)), (), T.step)
    for line in pending:
        kind, rest = line.split(None, 1)
        name, rest = rest.split(None, 1)
        kv = {}
        for p in _split_kv(rest):
            k, v = p.split("=", 1)
            kv[k] = v
        if kind == "A":
            alpha = parse_element(kv["alpha"], T)
            T = T.adjoin_A(name, int(kv["order"]), alpha.ground())
        elif kind == "P":
            T = T.adjoin_P(name, parse_element(kv["alpha"], T))
        elif kind == "S":
            T = T.adjoin_S(name, parse_element(kv["beta"], T))
        else:
            raise SyntaxError(f"unknown generator kind {kind!r}")
    return T


def _lcm(xs):
    from math import lcm
    out = 1
    for v in xs:
        out = lcm(out, v)
    return out


def _split_kv(rest):
    """Split ``a=1 b=(x + 1)/2`` into key=value chunks; values may contain spaces."""
    out = []
    cur = ""
    for tok in rest.split(" "):
        if "=" in tok and tok.split("=", 1)[0].isidentifier() and cur:
            out.append(cur)
            cur = tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    if cur:
        out.append(cur)
    return out
