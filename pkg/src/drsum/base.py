"""Solvers over the ground field K(x).

* :func:`solve_pflde` -- all (c, g) with sigma(g) + a*g = c_1 f_1 + ... + c_d f_d;
* :func:`solve_pmt` -- all integer z with sigma(g)/g = f_1^z_1 ... f_d^z_d;
* :func:`telescope_constant_ring` -- sigma(g) - g = rhs in K[y], y^n = 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from flint import fmpz, fmpz_mat

from .arith import GroundFieldElement, dispersion, normalize, root_of_unity_order, shift, split_x
from .linalg import field_equations, nullspace

log = logging.getLogger(__name__)

DEGREE_CAP = 200


class DegreeCapExceeded(RuntimeError):
    """A degree bound exceeded the configured cap; the search would be incomplete."""


class UnsupportedInput(ValueError):
    pass


@dataclass
class PFLDEInstance:
    a: GroundFieldElement
    f: list


@dataclass
class SolutionBasis:
    """Rows (c, g); c is a list of K elements."""
    rows: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


@dataclass
class MultiplicativeLattice:
    """Pairs (z, g) with sigma(g)/g = prod f_i^z_i."""
    basis: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


# -- helpers ---------------------------------------------------------------------

def _zfree(F, P):
    """A z-free multiple of P (its norm) with the same z-free factors."""
    if F.phi == 1 or P.degrees()[0] == 0:
        return P
    return F.reduce(P * F.adjugate(P))


def _pshift(F, P, j):
    if j == 0:
        return P
    g = F.ctx.gens()
    return P.compose(*g[:-1], g[-1] + j)


def universal_denominator(a, fs):
    """A multiple of the denominator of every g with sigma(g) + a g in span(fs)."""
    F = a.F
    Q = F.ctx.constant(1)
    for f in fs:
        if f and f.den.degrees()[-1]:
            Q = Q * (f.den / Q.gcd(f.den))
    A = _zfree(F, a.num) * Q
    B = _pshift(F, a.den * Q, -1)
    U = F.ctx.constant(1)
    if A.degrees()[-1] == 0 or B.degrees()[-1] == 0:
        return U
    for h in sorted(dispersion(A, B), reverse=True):
        d = A.gcd(_pshift(F, B, -h))
        if d.degrees()[-1] == 0:
            continue
        A = A / d
        B = B / _pshift(F, d, h)
        for i in range(h + 1):
            U = U * _pshift(F, d, i)
    return U


def _lc(p):
    c = p.coeffs_x()
    return c[-1]


def _degree_bound(B1, B0, R_deg, cap):
    """Bound for deg P in B1*P(x+1) + B0*P(x) = R."""
    S = B1 + B0
    c = B1.degree_x()
    b = S.degree_x() if S else None
    cands = [0]
    if b is not None and b > c - 1:
        if R_deg >= 0:
            cands.append(R_deg - b)
    else:
        if R_deg >= 0:
            cands.append(R_deg - c + 1)
        if b == c - 1:
            # leading terms cancel when deg P = -lc(S)/lc(B1)
            r = -_lc(S) / _lc(B1)
            if r.is_rational() and r.den.is_one() and r:
                v = int(r.num.leading_coefficient())
                if v >= 0:
                    cands.append(v)
    N = max(cands)
    if N > cap:
        raise DegreeCapExceeded(f"degree bound {N} exceeds cap {cap}")
    return N


def _scale_x(f, r):
    """f(r*x) for a rational r."""
    if not f or f.is_constant() or r == 1:
        return f
    F = f.F
    r = Fraction(r)

    def sc(P):
        parts = split_x(P)
        d = max(parts)
        out = F.ctx.constant(0)
        for j, c in parts.items():
            out = out + c * (r.numerator ** j * r.denominator ** (d - j)) * F._x ** j
        return out, d

    n, dn = sc(f.num)
    m, dm = sc(f.den)
    # f(rx) = n/q^dn / (m/q^dm)
    q = r.denominator
    if dn >= dm:
        return normalize(n, m * q ** (dn - dm), F)
    return normalize(n * q ** (dm - dn), m, F)


def check_pflde_row(a, fs, c, g, step=1):
    lhs = shift(g, step) + a * g
    rhs = a.F.zero
    for ci, fi in zip(c, fs):
        if ci:
            rhs = rhs + ci * fi
    return lhs == rhs


def solve_pflde(inst_or_a, fs=None, step=1, cap=DEGREE_CAP):
    """Basis of {(c, g) in K^d x K(x) : sigma(g) + a g = sum c_i f_i}.

    ``step`` is the shift of x (sigma(x) = x + step).
    """
    if isinstance(inst_or_a, PFLDEInstance):
        a, fs = inst_or_a.a, inst_or_a.f
    else:
        a = inst_or_a
    fs = list(fs)
    if not a:
        raise ValueError("a must be nonzero")
    if step != 1:
        a1 = _scale_x(a, step)
        f1 = [_scale_x(f, step) for f in fs]
        rows = _solve_pflde1(a1, f1, cap)
        rows = [(c, _scale_x(g, Fraction(1, step))) for c, g in rows]
    else:
        rows = _solve_pflde1(a, fs, cap)
    for c, g in rows:
        if not check_pflde_row(a, fs, c, g, step):
            raise AssertionError("PFLDE solution failed re-substitution")
    return SolutionBasis(rows)


def _solve_pflde1(a, fs, cap):
    F = a.F
    d = len(fs)
    U = universal_denominator(a, fs)
    Ue = GroundFieldElement._raw(F, U, F.ctx.constant(1))
    E1 = shift(Ue, 1).inverse()
    E0 = a / Ue
    # common denominator of E1, E0 and the f_i
    M = F.ctx.constant(1)
    for e in [E1, E0] + fs:
        if e and e.den.degrees()[-1]:
            M = M * (e.den / M.gcd(e.den))
    Me = GroundFieldElement._raw(F, M, F.ctx.constant(1))
    B1, B0 = E1 * Me, E0 * Me
    R = [f * Me for f in fs]
    R_deg = max((r.degree_x() for r in R), default=-1)
    N = _degree_bound(B1, B0, R_deg, cap)
    log.debug("pflde: deg U=%d, degree bound %d, d=%d", U.degrees()[-1], N, d)
    cols = []
    x = F.x
    xp1 = x + 1
    for k in range(N + 1):
        cols.append(B1 * xp1 ** k + B0 * x ** k)
    cols.extend(-r for r in R)
    rows = field_equations(cols, F)
    ns = nullspace(rows, len(cols), F) if rows else _identity(len(cols), F)
    out = []
    for v in ns:
        P = F.zero
        for k in range(N + 1):
            if v[k]:
                P = P + v[k] * x ** k
        out.append((v[N + 1:], P / Ue))
    return out


def _identity(n, F):
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


# -- multiplicative telescoping ----------------------------------------------------

def _integer_kernel(A, n):
    """Saturated Z-basis of {v in Z^n : A v = 0} (A given as a list of rows)."""
    k = len(A)
    if k == 0:
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    M = fmpz_mat([[A[r][i] for r in range(k)] + [1 if i == j else 0 for j in range(n)] for i in range(n)])
    H = M.hnf()
    out = []
    for i in range(H.nrows()):
        row = [int(H[i, j]) for j in range(k + n)]
        if not any(row[:k]) and any(row[k:]):
            out.append(row[k:])
    return out


def _factor_z_free(P):
    """(content, [(irreducible, multiplicity)]) for a z-free polynomial."""
    c, facs = P.factor()
    return int(c), [(f, int(e)) for f, e in facs]


class _FactorBase:
    """Irreducible factors: x-free ones individually, the others by shift class."""

    def __init__(self, F):
        self.F = F
        self.free = []
        self.classes = []

    def free_index(self, p):
        for i, q in enumerate(self.free):
            if p == q:
                return i
        self.free.append(p)
        return len(self.free) - 1

    def shift_class(self, p):
        """(class index, j) with p(x) = r(x + j) for the class representative r."""
        F = self.F
        parts = split_x(p)
        d = max(parts)
        for i, r in enumerate(self.classes):
            rp = split_x(r)
            if max(rp) != d or rp[d] != parts[d]:
                continue
            diff = parts.get(d - 1, F.ctx.constant(0)) - rp.get(d - 1, F.ctx.constant(0))
            if diff.is_zero():
                j = 0
            else:
                try:
                    q = diff / (parts[d] * d)
                except Exception:
                    continue
                if not q.is_constant():
                    continue
                j = int(q.leading_coefficient())
            if _pshift(F, r, j) == p:
                return i, j
        self.classes.append(p)
        return len(self.classes) - 1, 0


def _add_constant(v, F, fb, c, w):
    """Record the integer-polynomial constant c with weight w in the exponent map v."""
    cont, facs = _factor_z_free(c)
    if cont < 0:
        v["sign"] = v.get("sign", 0) + w
        cont = -cont
    for p, e in fmpz(cont).factor() if cont > 1 else []:
        k = ("prime", int(p))
        v[k] = v.get(k, 0) + w * int(e)
    for p, e in facs:
        k = ("free", fb.free_index(p))
        v[k] = v.get(k, 0) + w * e


def _split_zeta(F, f):
    for k in range(F.m if F.phi > 1 else 1):
        r = f * F.zeta ** (-k) if k else f
        if r.num.degrees()[0] == 0:
            return k, r
    raise UnsupportedInput("factor is not a root of unity times a z-free element")


def solve_pmt(fs):
    """Z-basis of all z with sigma(g)/g = prod f_i^z_i for some g in K(x)*, with witnesses."""
    fs = list(fs)
    if not fs:
        return MultiplicativeLattice([])
    F = fs[0].F
    if any(not f for f in fs):
        raise ValueError("PMT factors must be nonzero")
    fb = _FactorBase(F)
    vecs, shifts, ks = [], [], []
    for f in fs:
        k, r = _split_zeta(F, f)
        ks.append(k)
        v, sh = {}, []
        for w, P in ((1, r.num), (-1, r.den)):
            cont, facs = _factor_z_free(P)
            _add_constant(v, F, fb, F.ctx.constant(cont), w)
            for p, e in facs:
                if p.degrees()[-1] == 0:
                    key = ("free", fb.free_index(p))
                    v[key] = v.get(key, 0) + w * e
                    continue
                cls, j = fb.shift_class(p)
                sh.append((cls, j, w * e))
                lcp = split_x(p)[p.degrees()[-1]]
                if not lcp.is_one():
                    _add_constant(v, F, fb, lcp, w * e)
        vecs.append(v)
        shifts.append(sh)
    d = len(fs)
    rows = []
    for key in sorted({k for v in vecs for k in v if k != "sign"}, key=str):
        rows.append([v.get(key, 0) for v in vecs])
    for cidx in range(len(fb.classes)):
        rows.append([sum(m for c, j, m in sh if c == cidx) for sh in shifts])
    signs = [v.get("sign", 0) for v in vecs]
    congr = []  # (coefficients, modulus)
    if F.m % 2 == 0:
        congr.append(([k + (F.m // 2) * s for k, s in zip(ks, signs)], F.m))
    else:
        congr.append((signs, 2))
        if F.m > 1:
            congr.append((ks, F.m))
    nslack = len(congr)
    A = [r + [0] * nslack for r in rows]
    for i, (coef, mod) in enumerate(congr):
        A.append(coef + [(-mod if j == i else 0) for j in range(nslack)])
    ker = _integer_kernel(A, d + nslack)
    basis = _lattice_basis([k[:d] for k in ker if any(k[:d])], d)
    out = []
    for z in basis:
        g = _pmt_witness(F, fb, shifts, z)
        if not _check_pmt(fs, z, g):
            raise AssertionError("PMT witness failed re-substitution")
        out.append((z, g))
    return MultiplicativeLattice(out)


def _lattice_basis(vectors, d):
    if not vectors:
        return []
    H = fmpz_mat(vectors).hnf()
    out = []
    for i in range(H.nrows()):
        row = [int(H[i, j]) for j in range(d)]
        if any(row):
            out.append(row)
    return out


def _pmt_witness(F, fb, shifts, z):
    num = F.ctx.constant(1)
    den = F.ctx.constant(1)
    for sh, zi in zip(shifts, z):
        if not zi:
            continue
        for cls, j, m in sh:
            e = m * zi
            r = fb.classes[cls]
            if j == 0:
                continue
            # r(x+j)/r(x) = sigma(G)/G
            G = F.ctx.constant(1)
            for i in (range(j) if j > 0 else range(j, 0)):
                G = G * _pshift(F, r, i)
            if (j > 0) == (e > 0):
                num = num * G ** abs(e)
            else:
                den = den * G ** abs(e)
    return normalize(num, den, F)


def _check_pmt(fs, z, g):
    F = g.F
    lhs = shift(g, 1) / g
    rhs = F.one
    for f, zi in zip(fs, z):
        if zi:
            rhs = rhs * f ** zi
    return lhs == rhs


# -- constant ring ------------------------------------------------------------------

def telescope_constant_ring(alpha, rhs):
    """g in K[y] with sigma(g) - g = rhs where sigma(y) = alpha*y.

    ``rhs`` maps exponents i (mod the order of alpha) to coefficients in K;
    the result uses the same format.  Each y^i with i != 0 is summed by
    y^i / (alpha^i - 1).
    """
    n = root_of_unity_order(alpha)
    if n is None:
        raise ValueError("alpha is not a root of unity")
    items = rhs.items() if hasattr(rhs, "items") else enumerate(rhs)
    out = {}
    for i, c in items:
        if not c:
            continue
        i %= n
        if i == 0:
            raise ValueError("constant component not summable")
        out[i] = out.get(i, alpha.F.zero) + c / (alpha ** i - 1)
    return {i: c for i, c in out.items() if c}
