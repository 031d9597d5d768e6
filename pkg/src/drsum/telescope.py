"""Parameterized telescoping in towers: all (c, g) with sigma(g) - g = sum c_i f_i.

Two strategies are provided.

``recursive``
    Peel generators off the top of the PAS-ordered tower.  The working
    equation is ``A*sigma(g) - g = sum c_i f_i`` where the multiplier A is
    sigma(M)/M for the monomial M accumulated from the P/A exponents already
    peeled.  A nonzero h with A*sigma(h) = h exists only for A = 1.

``interlacing``
    Split along the idempotents of the single A-generator y, solve in each
    component ring with sigma_s, intersect the parameter spaces and finish
    the left-over part in K[y].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb

from .base import DEGREE_CAP, SolutionBasis, solve_pflde, telescope_constant_ring
from .interlace import _single_a, decompose, recompose, component_automorphism
from .linalg import linear_relations, nullspace
from .tower import RingElement, Tower, TowerError, reorder

log = logging.getLogger(__name__)


class NoRecurrence(RuntimeError):
    """No creative telescoping relation up to the order cap."""


@dataclass
class PTDRInstance:
    tower: Tower
    f: list


@dataclass
class IndependenceCertificate:
    instance: PTDRInstance
    strategy: str
    basis: SolutionBasis
    statement: str = "no (c, g) with c != 0 solves sigma(g) - g = sum c_i f_i"

    def recheck(self):
        b = solve_ptdr(self.instance, strategy=self.strategy)
        return all(not any(c) for c, _ in b)


@dataclass
class CreativeResult:
    order: int
    coeffs: list
    g: RingElement
    summands: list = field(default_factory=list)
    tried: list = field(default_factory=list)  # orders without a solution


# -- small helpers ---------------------------------------------------------------

def _is_one(A):
    return A.terms == {A.T.zero_exp: A.T.F.one}


def _comb(lams, elems, zero):
    out = zero
    for l, e in zip(lams, elems):
        if l and e:
            out = out + e.scale(l)
    return out


def _comb_c(lams, cs, d, K):
    out = [K.zero] * d
    for l, c in zip(lams, cs):
        if l:
            out = [a + l * b if b else a for a, b in zip(out, c)]
    return out


def _identity_rows(T, d):
    K = T.F
    return [([K.one if i == j else K.zero for j in range(d)], T.zero) for i in range(d)]


def _drop_top(A, sub):
    """A (single monomial) without its top exponent, and that exponent."""
    (e, c), = A.terms.items()
    return RingElement(sub, {e[:-1]: c}), e[-1]


def _intersect(T, parts, d):
    """Combine per-exponent solutions that share the same c.

    ``parts`` maps a key (the exponent) to (rows, embed) where rows are
    (c, g_key) pairs and embed(g_key) places the piece into T.
    """
    K = T.F
    keys = list(parts)
    if not keys:
        return _identity_rows(T, d)
    offs, n = {}, 0
    for k in keys:
        offs[k] = n
        n += len(parts[k][0])
    eqs = []
    k0 = keys[0]
    for k in keys[1:]:
        for i in range(d):
            row = [K.zero] * n
            for j, (c, _) in enumerate(parts[k][0]):
                row[offs[k] + j] = c[i]
            for j, (c, _) in enumerate(parts[k0][0]):
                row[offs[k0] + j] = row[offs[k0] + j] - c[i]
            eqs.append(row)
    out = []
    for v in nullspace(eqs, n, K):
        rows0 = parts[k0][0]
        c = _comb_c(v[offs[k0]:offs[k0] + len(rows0)], [r[0] for r in rows0], d, K)
        g = T.zero
        for k in keys:
            rows, embed = parts[k]
            lam = v[offs[k]:offs[k] + len(rows)]
            piece = _comb(lam, [r[1] for r in rows], rows[0][1].T.zero if rows else None)
            if piece:
                g = g + embed(piece)
        out.append((c, g))
    return out


# -- recursive strategy -----------------------------------------------------------------

def _ptdr(T, A, fs, cap):
    d = len(fs)
    if all(not f for f in fs) and not _is_one(A):
        return _identity_rows(T, d)
    if not T.gens:
        Ag = A.ground()
        inv = Ag.inverse()
        basis = solve_pflde(-inv, [f.ground() * inv for f in fs], step=T.step, cap=cap)
        return [(list(c), T(g)) for c, g in basis]
    kind = T.gens[-1].kind
    if kind == "S":
        return _sigma_layer(T, A, fs, cap)
    if kind == "P":
        return _pi_layer(T, A, fs, cap)
    return _a_layer(T, A, fs, cap)


def _sigma_layer(T, A, fs, cap):
    d = len(fs)
    K = T.F
    n = len(T.gens)
    sub = T.prefix(n - 1)
    Asub, _ = _drop_top(A, sub)
    beta = sub.lift(T.gens[-1].beta)
    tc = [f.top_coeffs() if f else {} for f in fs]
    degf = max((f.degree(n - 1) for f in fs), default=-1)
    b = degf + 1 if _is_one(A) else degf
    if b < 0:
        return _identity_rows(T, d)
    bpow = [sub.one]
    for _ in range(b):
        bpow.append(bpow[-1] * beta)
    # rows: (c, {l: g_l}, {l: sigma(g_l)})
    rhs = [t.get(b, sub.zero) for t in tc]
    cur = [(c, {b: g}, {b: sub.sigma(g)}) for c, g in _ptdr(sub, Asub, rhs, cap)]
    for l in range(b - 1, -1, -1):
        if not cur:
            return []
        rhs = []
        for c, gs, sg in cur:
            r = sub.zero
            for i in range(d):
                if c[i] and l in tc[i]:
                    r = r + tc[i][l].scale(c[i])
            acc = sub.zero
            for lp, s in sg.items():
                if lp > l and s:
                    acc = acc + s * bpow[lp - l] * comb(lp, l)
            rhs.append(r - Asub * acc)
        sol = _ptdr(sub, Asub, rhs, cap)
        new = []
        for lam, h in sol:
            c = _comb_c(lam, [r[0] for r in cur], d, K)
            gs, sg = {l: h}, {l: sub.sigma(h)}
            for lp in range(l + 1, b + 1):
                gs[lp] = _comb(lam, [r[1].get(lp, sub.zero) for r in cur], sub.zero)
                sg[lp] = _comb(lam, [r[2].get(lp, sub.zero) for r in cur], sub.zero)
            new.append((c, gs, sg))
        cur = new
    t = T.gen(n - 1)
    out = []
    for c, gs, _ in cur:
        g = T.zero
        for l, gl in gs.items():
            if gl:
                g = g + T.lift(gl) * t ** l
        out.append((c, g))
    return out


def _pi_layer(T, A, fs, cap):
    d = len(fs)
    n = len(T.gens)
    sub = T.prefix(n - 1)
    Asub, k = _drop_top(A, sub)
    alpha = sub.lift(T.gens[-1].alpha)
    p = T.gen(n - 1)
    tc = [f.top_coeffs() if f else {} for f in fs]
    S = sorted({e for t in tc for e in t})
    if k != 0:
        return _pi_chain(T, sub, Asub, k, alpha, tc, S, d)
    E = set(S)
    if _is_one(Asub):
        E.add(0)
    parts = {}
    for e in sorted(E):
        mult = Asub * alpha ** e
        rows = _ptdr(sub, mult, [t.get(e, sub.zero) for t in tc], cap)
        parts[e] = (rows, lambda g, e=e: T.lift(g) * p ** e)
    return _intersect(T, parts, d)


def _pi_chain(T, sub, Asub, k, alpha, tc, S, d):
    """A = A'*p^k with k != 0: g_e = A' alpha^(e-k) sigma(g_(e-k)) - F_e, no recursion."""
    K = T.F
    p = T.gen(len(T.gens) - 1)
    if not S:
        return _identity_rows(T, d)
    lo, hi = S[0], S[-1]
    if k > 0:
        supp = range(lo, hi - k + 1)
        order = range(lo - k, hi + k + 1)
    else:
        supp = range(lo - k, hi + 1)
        order = range(hi - k, lo + k - 1, -1)
    supp = set(supp)
    per = []
    for i in range(d):
        g = {}
        resid = {}
        for e in order:
            prev = g.get(e - k)
            val = sub.zero
            if prev:
                val = Asub * alpha ** (e - k) * sub.sigma(prev)
            Fe = tc[i].get(e, sub.zero)
            if e in supp:
                v = val - Fe
                if v:
                    g[e] = v
            else:
                r = val - Fe
                if r:
                    resid[e] = r
        per.append((g, resid))
    vecs = []
    for g, resid in per:
        v = {}
        for e, r in resid.items():
            for ex, c in r.terms.items():
                v[(e, ex)] = c
        vecs.append(v)
    out = []
    for lam in linear_relations(vecs, K):
        g = T.zero
        for l, (gi, _) in zip(lam, per):
            if l:
                for e, ge in gi.items():
                    g = g + T.lift(ge.scale(l)) * p ** e
        out.append((list(lam), g))
    return out


def _a_layer(T, A, fs, cap):
    d = len(fs)
    n = len(T.gens)
    sub = T.prefix(n - 1)
    Asub, _ = _drop_top(A, sub)
    gen = T.gens[-1]
    zeta = gen.alpha
    y = T.gen(n - 1)
    tc = [f.top_coeffs() if f else {} for f in fs]
    E = {e for t in tc for e in t}
    (ae, ac), = Asub.terms.items()
    if not any(ae):
        for e in range(gen.order):
            if (ac * zeta ** e).is_one():
                E.add(e)
    parts = {}
    for e in sorted(E):
        mult = Asub.scale(zeta ** e)
        rows = _ptdr(sub, mult, [t.get(e, sub.zero) for t in tc], cap)
        parts[e] = (rows, lambda g, e=e: T.lift(g) * y ** e)
    return _intersect(T, parts, d)


# -- canonical form and checks ---------------------------------------------------------

def _poly_part_const(r):
    """Constant term of the polynomial part of r in K(x)."""
    K = r.F
    if not r:
        return K.zero
    num = r.numerator().coeffs_x() if not r.is_constant() else None
    if r.is_constant():
        return r
    den = r.denominator().coeffs_x()
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    if dn < dd:
        return K.zero
    q = [K.zero] * (dn - dd + 1)
    lc = den[-1]
    for i in range(dn - dd, -1, -1):
        c = num[i + dd] / lc
        q[i] = c
        if c:
            for j in range(dd + 1):
                num[i + j] = num[i + j] - c * den[j]
    return q[0]


def _as_vector(c, g):
    v = {("c", i): ci for i, ci in enumerate(c) if ci}
    for k, val in g.terms.items():
        v[("g", k)] = val
    return v


def _independent(rows):
    kept = []
    for r in rows:
        trial = kept + [r]
        if not linear_relations([_as_vector(c, g) for c, g in trial], r[1].T.F):
            kept.append(r)
    return kept


def canonicalize(T, rows, d):
    """Echelon form on the c-part; homogeneous part normalized to (0, 1)."""
    rows = [(list(c), g) for c, g in rows]
    out = []
    r = 0
    for col in range(d):
        piv = next((i for i in range(r, len(rows)) if rows[i][0][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        c, g = rows[r]
        inv = c[col].inverse()
        c = [v * inv for v in c]
        g = g.scale(inv)
        rows[r] = (c, g)
        for i in range(len(rows)):
            if i != r and rows[i][0][col]:
                f = rows[i][0][col]
                rows[i] = ([a - f * b for a, b in zip(rows[i][0], c)], rows[i][1] - g.scale(f))
        r += 1
    out = rows[:r]
    homog = _independent([(c, g) for c, g in rows[r:] if g])
    has_const = False
    fixed = []
    for c, g in homog:
        if g.is_constant():
            has_const = True
            fixed.append((c, T.one))
        else:
            fixed.append((c, g))
    if has_const:
        shifted = []
        for c, g in out:
            k = _poly_part_const(g.ground())
            shifted.append((c, g - T(k) if k else g))
        out = shifted
    return out + fixed


def check_row(T, fs, c, g):
    lhs = T.sigma(g) - g
    rhs = T.zero
    for ci, f in zip(c, fs):
        if ci and f:
            rhs = rhs + T.lift(f).scale(ci)
    return lhs == rhs


def _finish(T, fs, rows, d):
    rows = canonicalize(T, rows, d)
    for c, g in rows:
        if not check_row(T, fs, c, g):
            raise AssertionError("telescoping solution failed re-substitution")
    return SolutionBasis(rows)


def _coerce(inst_or_T, fs):
    if isinstance(inst_or_T, PTDRInstance):
        return inst_or_T.tower, [inst_or_T.tower.lift(f) for f in inst_or_T.f]
    T = inst_or_T
    return T, [T(f) if not isinstance(f, RingElement) else T.lift(f) for f in fs]


# -- public solvers ------------------------------------------------------------------------

def solve_ptdr_recursive(inst_or_T, fs=None, cap=DEGREE_CAP):
    """Basis of V(f, E) by recursion over the generators."""
    T, fs = _coerce(inst_or_T, fs)
    d = len(fs)
    T2, fwd, bwd = reorder(T, "PAS")
    rows = _ptdr(T2, T2.one, [fwd(f) for f in fs], cap)
    rows = [(c, bwd(g)) for c, g in rows]
    return _finish(T, fs, rows, d)


def _component_solutions(T, fs, cap):
    """Per component s: rows (c, g~_s) for sigma_s(g) - g = sum c f~_s."""
    pos, n, _ = _single_a(T)
    F = []
    for f in fs:
        acc = T.zero
        cur = f
        for j in range(n):
            acc = acc + cur
            if j < n - 1:
                cur = T.sigma(cur)
        F.append(acc)
    comps = [decompose(T, f) for f in F]
    out = []
    for s in range(n):
        ring = component_automorphism(T, s)
        fts = [comps[i][s] for i in range(len(fs))]
        out.append(solve_ptdr_recursive(ring.tower, fts, cap))
    return out


def assemble_interlacing(T, f, c, comps):
    """Given c and component solutions g~_s, return (g~, f', g', g).

    f' = c*f - (sigma(g~) - g~) must lie in K[y]; g' sums it there.
    """
    pos, n, alpha = _single_a(T)
    if not isinstance(f, (list, tuple)):
        f, c = [f], [c]
    gt = recompose(T, comps)
    cf = T.zero
    for ci, fi in zip(c, f):
        if ci:
            cf = cf + T.lift(fi).scale(ci)
    fp = cf - (T.sigma(gt) - gt)
    coeffs = _constant_poly(T, fp, pos)
    if coeffs is None:
        raise TowerError("left-over part is not in K[y]")
    gp = T.zero
    if pos is not None:
        y = T.gen(pos)
        for i, v in telescope_constant_ring(alpha, coeffs).items():
            gp = gp + (y ** i).scale(v)
    elif coeffs.get(0):
        raise ValueError("constant component not summable")
    return gt, fp, gp, gt + gp


def _constant_poly(T, f, pos):
    """{i: c} if f = sum c_i y^i with c_i in K, else None."""
    out = {}
    for e, v in f.terms.items():
        if any(x for j, x in enumerate(e) if j != pos) or not v.is_constant():
            return None
        out[e[pos] if pos is not None else 0] = v
    return out


def solve_ptdr_interlacing(inst_or_T, fs=None, cap=DEGREE_CAP, trace=None):
    """Basis of V(f, E) through the idempotent components of the A-generator."""
    T, fs = _coerce(inst_or_T, fs)
    d = len(fs)
    pos, n, alpha = _single_a(T)
    K = T.F
    bases = _component_solutions(T, fs, cap)
    # W: c common to all components
    parts = {s: ([(c, g) for c, g in b.rows], lambda g: g) for s, b in enumerate(bases)}
    keys = list(parts)
    offs, N = {}, 0
    for s in keys:
        offs[s] = N
        N += len(parts[s][0])
    eqs = []
    for s in keys[1:]:
        for i in range(d):
            row = [K.zero] * N
            for j, (c, _) in enumerate(parts[s][0]):
                row[offs[s] + j] = c[i]
            for j, (c, _) in enumerate(parts[0][0]):
                row[offs[0] + j] = row[offs[0] + j] - c[i]
            eqs.append(row)
    cand = []
    for v in nullspace(eqs, N, K):
        c = _comb_c(v[:len(parts[0][0])], [r[0] for r in parts[0][0]], d, K)
        if not any(c):
            continue
        comps = []
        for s in keys:
            rows = parts[s][0]
            ring = component_automorphism(T, s)
            comps.append(_comb(v[offs[s]:offs[s] + len(rows)], [r[1] for r in rows], ring.tower.zero))
        cand.append((c, comps))
    # y^0 coefficient of f' must vanish
    assembled = []
    for c, comps in cand:
        gt, fp, _, _ = _assemble_raw(T, fs, c, comps, pos)
        assembled.append((c, gt, fp))
    if trace is not None:
        trace["components"] = bases
        trace["candidates"] = assembled
    zero_key = T.zero_exp
    col = [[fp.terms.get(zero_key, K.zero) for _, _, fp in assembled]]
    rows = []
    for lam in nullspace(col, len(assembled), K):
        c = _comb_c(lam, [a[0] for a in assembled], d, K)
        gt = _comb(lam, [a[1] for a in assembled], T.zero)
        fp = _comb(lam, [a[2] for a in assembled], T.zero)
        gp = T.zero
        if pos is not None:
            y = T.gen(pos)
            coeffs = _constant_poly(T, fp, pos)
            for i, v in telescope_constant_ring(alpha, coeffs).items():
                gp = gp + (y ** i).scale(v)
        rows.append((c, gt + gp))
    rows.append(([K.zero] * d, T.one))
    rows = _independent([r for r in rows if any(r[0]) or r[1]])
    return _finish(T, fs, rows, d)


def _assemble_raw(T, fs, c, comps, pos):
    gt = recompose(T, comps)
    cf = T.zero
    for ci, fi in zip(c, fs):
        if ci:
            cf = cf + fi.scale(ci)
    fp = cf - (T.sigma(gt) - gt)
    if _constant_poly(T, fp, pos) is None:
        raise AssertionError("interlacing: left-over part is not in K[y]")
    return gt, fp, None, None


def default_strategy(T):
    return "interlacing" if len(T.a_pos) == 1 else "recursive"


def solve_ptdr(inst_or_T, fs=None, strategy=None, cap=DEGREE_CAP):
    T, fs = _coerce(inst_or_T, fs)
    strategy = strategy or default_strategy(T)
    if strategy == "recursive":
        return solve_ptdr_recursive(T, fs, cap)
    if strategy == "interlacing":
        return solve_ptdr_interlacing(T, fs, cap)
    raise ValueError(f"unknown strategy {strategy!r}")


def same_span(b1, b2):
    """Mutual membership of two solution bases."""
    def rank(rows):
        if not rows:
            return 0
        vecs = [_as_vector(c, g) for c, g in rows]
        return len(rows) - len(linear_relations(vecs, rows[0][1].T.F))
    r1, r2 = rank(list(b1)), rank(list(b2))
    return r1 == r2 == rank(list(b1) + list(b2))


# -- front doors -----------------------------------------------------------------------------

def creative_telescope(T, summands, cap=10, strategy=None, start=1):
    """Smallest order d with sigma(g) - g = c_1 f_1 + ... + c_d f_d, c != 0.

    ``summands`` is a list or a callable i -> f_i (i = 1, 2, ...).
    """
    get = summands if callable(summands) else (lambda i: summands[i - 1])
    fs = []
    tried = []
    limit = cap if callable(summands) else min(cap, len(summands))
    for d in range(1, limit + 1):
        fs.append(T.lift(get(d)))
        if d < start:
            continue
        b = solve_ptdr(T, fs, strategy=strategy)
        nz = [(c, g) for c, g in b if any(c)]
        log.info("creative telescoping: order %d, %d nontrivial rows", d, len(nz))
        if nz:
            c, g = nz[0]
            return CreativeResult(d, c, g, list(fs), tried)
        tried.append(d)
    raise NoRecurrence(f"no recurrence found up to order {cap}")


def certify_independence(inst_or_T, fs=None, strategy=None, cap=DEGREE_CAP):
    """IndependenceCertificate, or the relation (c, g) refuting it."""
    T, fs = _coerce(inst_or_T, fs)
    strategy = strategy or default_strategy(T)
    b = solve_ptdr(T, fs, strategy=strategy, cap=cap)
    for c, g in b:
        if any(c):
            return c, g
    return IndependenceCertificate(PTDRInstance(T, fs), strategy, b)
