"""Exact arithmetic in K = Q(zeta_m)(n_1, ..., n_l) and in the ground field K(x).

Every element is stored as a fraction N/D of integer polynomials in the
variables ``z, n_1, ..., n_l, x`` (lex order, in that sequence) where

* N is reduced modulo the cyclotomic polynomial Phi_m in z,
* D does not contain z,
* gcd(N, D) = 1 and D has positive leading coefficient.

Since {1, z, ..., z^(phi(m)-1)} is a free basis, this form is unique, so
structural equality is mathematical equality.  Elements of K are simply the
elements without x.

>>> F = Field.get(2, ("n",))
>>> x, n = F.x, F.param("n")
>>> normalize((n - x) * (x + 1), (x + 1) ** 2)
(n - x)/(x + 1)
>>> shift(1 / (x + 1), -1)
1/x
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd

from flint import fmpz_mpoly_ctx, fmpz_poly


def _totient(m):
    return sum(1 for k in range(1, m + 1) if igcd(k, m) == 1)


class Field:
    """The field Q(zeta_m)(params)(x); instances are cached per (m, params)."""

    def __init__(self, m, params):
        if m < 1:
            raise ValueError("cyclotomic order must be positive")
        self.m = m
        self.params = tuple(params)
        self.names = ("z",) + self.params + ("x",)
        self.ctx = fmpz_mpoly_ctx.get(self.names, "lex")
        gens = self.ctx.gens()
        self._z, self._x = gens[0], gens[-1]
        self.nvars = len(gens)
        self.phi = _totient(m)
        cyc = fmpz_poly.cyclotomic(m).coeffs()
        self.cyclo = self.ctx.from_dict(
            {(i,) + (0,) * (self.nvars - 1): int(c) for i, c in enumerate(cyc) if c})
        self.units = [k for k in range(1, m) if igcd(k, m) == 1] or [1]
        self._zero = GroundFieldElement._raw(self, self.ctx.constant(0), self.ctx.constant(1))
        self._one = GroundFieldElement._raw(self, self.ctx.constant(1), self.ctx.constant(1))

    @staticmethod
    @lru_cache(maxsize=None)
    def get(m=2, params=()):
        return Field(m, tuple(params))

    def __repr__(self):
        return f"Field(m={self.m}, params={self.params})"

    def __reduce__(self):
        return (Field.get, (self.m, self.params))

    # -- polynomial helpers -------------------------------------------------
    def poly(self, v):
        if isinstance(v, int):
            return self.ctx.constant(v)
        return v

    def reduce(self, N):
        """Reduce a polynomial modulo Phi_m in z."""
        if self.phi == 1:
            if N.degrees()[0]:
                # z is a literal +-1 here
                N = N.compose(self.ctx.constant(1 if self.m == 1 else -1),
                              *self.ctx.gens()[1:])
            return N
        if N.degrees()[0] >= self.phi:
            N = divmod(N, self.cyclo)[1]
        return N

    def conjugate(self, N, k):
        """Image of N under zeta -> zeta^k."""
        gens = self.ctx.gens()
        return self.reduce(N.compose(self._z ** k, *gens[1:]))

    def adjugate(self, N):
        """Product of the non-trivial conjugates, so that N * adj is z-free."""
        out = self.ctx.constant(1)
        for k in self.units:
            if k != 1:
                out = self.reduce(out * self.conjugate(N, k))
        return out

    # -- element constructors ----------------------------------------------
    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    @property
    def x(self):
        return GroundFieldElement._raw(self, self._x, self.ctx.constant(1))

    @property
    def zeta(self):
        """The primitive m-th root of unity."""
        if self.phi == 1:
            return self(1 if self.m == 1 else -1)
        return GroundFieldElement._raw(self, self._z, self.ctx.constant(1))

    def param(self, name):
        i = self.params.index(name)
        return GroundFieldElement._raw(self, self.ctx.gens()[1 + i], self.ctx.constant(1))

    def __call__(self, v):
        if isinstance(v, GroundFieldElement):
            if v.F is self:
                return v
            return v.to_field(self)
        if isinstance(v, Fraction):
            return normalize(self.ctx.constant(v.numerator), self.ctx.constant(v.denominator), self)
        if isinstance(v, int):
            return GroundFieldElement._raw(self, self.ctx.constant(v), self.ctx.constant(1))
        raise TypeError(f"cannot coerce {type(v).__name__} into {self}")

    def superfield(self, m=None, params=()):
        """A field containing this one, with order lcm(m, self.m) and extra params."""
        from math import lcm
        mm = lcm(self.m, m or 1)
        ps = self.params + tuple(p for p in params if p not in self.params)
        return Field.get(mm, ps)


class GroundFieldElement:
    """An element N/D of K(x) in canonical form (see module docstring)."""

    __slots__ = ("F", "num", "den", "_h")

    @classmethod
    def _raw(cls, F, num, den):
        e = object.__new__(cls)
        e.F, e.num, e.den, e._h = F, num, den, None
        return e

    # -- predicates ----------------------------------------------------------
    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self):
        """True for elements of K (free of x)."""
        return self.num.degrees()[-1] <= 0 and self.den.degrees()[-1] == 0

    def is_rational(self):
        """True for elements of Q."""
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self):
        """True when the denominator is free of x."""
        return self.den.degrees()[-1] == 0

    def has_params(self):
        d1, d2 = self.num.degrees(), self.den.degrees()
        return any(d1[1:-1]) or any(d2[1:-1])

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GroundFieldElement):
            if other.F is not self.F:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.F(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return normalize(self.num + o.num, self.den, self.F)
        g = self.den.gcd(o.den)
        d2 = o.den / g
        return normalize(self.num * d2 + o.num * (self.den / g), self.den * d2, self.F)

    __radd__ = __add__

    def __neg__(self):
        return GroundFieldElement._raw(self.F, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return self.F.zero
        if o.is_one():
            return self
        if self.is_one():
            return o
        # cross-cancel before multiplying
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num / g1, o.den / g1) if not g1.is_one() else (self.num, o.den)
        n2, d1 = (o.num / g2, self.den / g2) if not g2.is_one() else (o.num, self.den)
        F = self.F
        N = F.reduce(n1 * n2)
        if F.phi > 1 and (n1.degrees()[0] or n2.degrees()[0]):
            return normalize(N, d1 * d2, F)
        D = d1 * d2
        if D.leading_coefficient() < 0:
            N, D = -N, -D
        return GroundFieldElement._raw(F, N, D)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero")
        F = self.F
        if F.phi == 1 or self.num.degrees()[0] == 0:
            return normalize(self.den, self.num, F)
        adj = F.adjugate(self.num)
        norm = F.reduce(self.num * adj)
        return normalize(self.den * adj, norm, F)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return self.F.one
        if self.F.phi == 1 or self.num.degrees()[0] == 0:
            N, D = self.num ** e, self.den ** e
            if self.F.phi == 1:
                N = self.F.reduce(N)
            return GroundFieldElement._raw(self.F, N, D)
        out, base = self.F.one, self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.F(other)
        if not isinstance(other, GroundFieldElement):
            return NotImplemented
        return self.F is other.F and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._h is None:
            self._h = hash((str(self.num), str(self.den)))
        return self._h

    # -- structure ----------------------------------------------------------
    def shift(self, j):
        return shift(self, j)

    def numerator(self):
        return GroundFieldElement._raw(self.F, self.num, self.F.ctx.constant(1))

    def denominator(self):
        return GroundFieldElement._raw(self.F, self.den, self.F.ctx.constant(1))

    def degree_x(self):
        """Degree in x of a polynomial element (-1 for zero)."""
        if self.is_zero():
            return -1
        return self.num.degrees()[-1] - self.den.degrees()[-1]

    def coeffs_x(self):
        """Coefficients in K of a polynomial element, lowest degree first."""
        if not self.is_polynomial():
            raise ValueError("not a polynomial in x")
        parts = split_x(self.num)
        out = [self.F.zero] * (max(parts) + 1 if parts else 0)
        for j, c in parts.items():
            out[j] = normalize(c, self.den, self.F)
        return out

    def subs_x(self, k):
        """Value at x = k (an integer); poles give the value 0."""
        d = self.den.subs({"x": k}) if self.den.degrees()[-1] else self.den
        if d.is_zero():
            return self.F.zero
        n = self.num.subs({"x": k}) if self.num.degrees()[-1] else self.num
        return normalize(n, d, self.F)

    def specialize(self, values):
        """Substitute rational values for parameters (z and x are kept)."""
        return specialize(self, values)

    def to_field(self, G):
        """Embed into a superfield G (same or larger m, superset of params)."""
        F = self.F
        if G is F:
            return self
        if G.m % F.m or not set(F.params) <= set(G.params):
            raise ValueError(f"{G} does not contain {F}")
        mapping = [G._z ** (G.m // F.m)] + [G.ctx.gens()[1 + G.params.index(p)] for p in F.params] + [G._x]
        N = G.reduce(self.num.compose(*mapping, ctx=G.ctx))
        D = self.den.compose(*mapping, ctx=G.ctx)
        return normalize(N, D, G)

    def __repr__(self):
        return render(self)

    __str__ = __repr__


# Views named after the roles the same representation plays.
CyclotomicRational = GroundFieldElement
ParamRational = GroundFieldElement


def normalize(num, den, F=None):
    """Canonical fraction num/den.

    ``num`` and ``den`` may be flint polynomials of ``F.ctx`` or field elements.
    """
    if isinstance(num, GroundFieldElement) or isinstance(den, GroundFieldElement):
        F = F or (num.F if isinstance(num, GroundFieldElement) else den.F)
        a = num if isinstance(num, GroundFieldElement) else F(num) if isinstance(num, int) else GroundFieldElement._raw(F, num, F.ctx.constant(1))
        b = den if isinstance(den, GroundFieldElement) else F(den) if isinstance(den, int) else GroundFieldElement._raw(F, den, F.ctx.constant(1))
        return a / b
    if F is None:
        raise TypeError("field required for raw polynomials")
    if isinstance(num, int):
        num = F.ctx.constant(num)
    if isinstance(den, int):
        den = F.ctx.constant(den)
    if den.is_zero():
        raise ZeroDivisionError("division by zero")
    num = F.reduce(num)
    if num.is_zero():
        return F.zero
    if den.degrees()[0]:
        # move z out of the denominator
        adj = F.adjugate(den)
        num = F.reduce(num * adj)
        den = F.reduce(den * adj)
    g = num.gcd(den)
    if not g.is_one():
        num, den = num / g, den / g
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    return GroundFieldElement._raw(F, num, den)


def split_x(P):
    """Split a polynomial into {j: coefficient of x^j} (coefficients x-free)."""
    ctx = P.context()
    buckets = {}
    for mon, c in P.terms():
        j = mon[-1]
        buckets.setdefault(j, {})[mon[:-1] + (0,)] = int(c)
    return {j: ctx.from_dict(d) for j, d in buckets.items()}


def shift(f, j):
    """Substitute x -> x + j."""
    if j == 0 or f.is_constant():
        return f
    F = f.F
    gens = F.ctx.gens()
    sub = list(gens[:-1]) + [gens[-1] + j]
    N = f.num.compose(*sub) if f.num.degrees()[-1] else f.num
    D = f.den.compose(*sub) if f.den.degrees()[-1] else f.den
    if D.leading_coefficient() < 0:
        N, D = -N, -D
    return GroundFieldElement._raw(F, N, D)


def specialize(f, values):
    F = f.F
    if not values:
        return f
    idx = {F.params.index(k) + 1: Fraction(v) for k, v in values.items()}

    def ev(P):
        acc, lcm_den = {}, 1
        for mon, c in P.terms():
            v = Fraction(int(c))
            rest = [int(e) for e in mon]
            for i, val in idx.items():
                if rest[i]:
                    v *= val ** rest[i]
                    rest[i] = 0
            key = tuple(rest)
            acc[key] = acc.get(key, 0) + v
        for v in acc.values():
            lcm_den = lcm_den * v.denominator // igcd(lcm_den, v.denominator)
        poly = F.ctx.from_dict({k: int(v * lcm_den) for k, v in acc.items() if v})
        return poly, lcm_den

    n, a = ev(f.num)
    d, b = ev(f.den)
    if d.is_zero():
        raise ZeroDivisionError(f"specialization {values} hits a pole")
    return normalize(n * b, d * a, F)


def primitive_root(m, field=None):
    """zeta_m inside ``field`` (default: Q(zeta_m))."""
    if m < 1:
        raise ValueError("root of unity order must be positive")
    F = field or Field.get(max(m, 1) if m > 2 else 2)
    if m == 1:
        return F.one
    if m == 2:
        return F(-1)
    if F.m % m:
        raise ValueError(f"field of order {F.m} has no primitive {m}-th root of unity")
    return F.zeta ** (F.m // m)


def root_of_unity_order(c):
    """Multiplicative order of c if it is a root of unity, else None."""
    if c.is_zero():
        raise ValueError("zero is not a unit")
    if not c.is_constant() or c.has_params() or not c.den.is_one():
        return None
    M = c.F.m * (2 if c.F.m % 2 else 1)
    if not (c ** M).is_one():
        return None
    for d in sorted(d for d in range(1, M + 1) if M % d == 0):
        if (c ** d).is_one():
            return d
    return None


def _as_poly(p):
    if isinstance(p, GroundFieldElement):
        if not p.is_polynomial():
            raise ValueError("expected a polynomial in x")
        return p.num, p.F
    return p, None


def _identical_int_roots(P, var):
    """Integer values k of variable ``var`` at which P vanishes identically."""
    if P.is_zero():
        raise ValueError("zero polynomial has every integer as a root")
    buckets = {}
    for mon, c in P.terms():
        key = mon[:var] + mon[var + 1:]
        buckets.setdefault(key, {})[mon[var]] = int(c)
    g = None
    for d in buckets.values():
        u = fmpz_poly([d.get(i, 0) for i in range(max(d) + 1)])
        g = u if g is None else g.gcd(u)
        if g.degree() == 0:
            return set()
    roots = set()
    _, facs = g.factor()
    for fac, _e in facs:
        if fac.degree() == 1:
            b, a = int(fac[0]), int(fac[1])
            if b % a == 0:
                roots.add(-b // a)
    return roots


def integer_roots(p):
    """All k in Z with p(k) = 0 identically in the parameters."""
    P, _ = _as_poly(p)
    return _identical_int_roots(P, P.context().nvars() - 1)


def _shift_ctx(ctx):
    names = tuple(ctx.names()) + ("_s",)
    return fmpz_mpoly_ctx.get(names, "lex")


def dispersion(p, q):
    """All j >= 0 such that gcd(p(x + j), q(x)) is nonconstant."""
    P, F = _as_poly(p)
    Q, _ = _as_poly(q)
    if P.is_zero() or Q.is_zero():
        raise ValueError("dispersion of the zero polynomial")
    ctx = P.context()
    nx = ctx.nvars() - 1
    if P.degrees()[nx] == 0 or Q.degrees()[nx] == 0:
        return set()
    c2 = _shift_ctx(ctx)
    g2 = c2.gens()
    P2 = P.compose(*g2[:nx], g2[nx] + g2[nx + 1], ctx=c2)
    Q2 = Q.compose(*g2[:nx + 1], ctx=c2)
    R = P2.resultant(Q2, ctx.names()[nx])
    if F is not None and F.phi > 1 and R.degrees()[0]:
        cyc = F.cyclo.compose(*g2[:nx + 1], ctx=c2)
        R = divmod(R, cyc)[1]
    if R.is_zero():
        raise ValueError("polynomials share a factor for every shift")
    return {j for j in _identical_int_roots(R, nx + 1) if j >= 0}


# -- rendering -----------------------------------------------------------------

def _render_poly(P):
    s = str(P)
    return s.replace("(-1)*", "-").replace("+ -", "- ")


def render(f):
    """Canonical text: ``num`` or ``(num)/(den)`` with z, parameters and x by name."""
    if f.den.is_one():
        return _render_poly(f.num)
    n = _render_poly(f.num)
    d = _render_poly(f.den)
    if len(f.num.monoms()) > 1:
        n = f"({n})"
    if len(f.den.monoms()) > 1:
        d = f"({d})"
    return f"{n}/{d}"
