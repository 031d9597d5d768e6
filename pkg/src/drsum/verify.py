"""Deciding whether an APS-tower is a basic RPiSigma-extension.

Each generator is tested against the part of the tower below it:

* S-generator t with sigma(t) = t + beta: refuted iff sigma(g) = g + beta has a
  solution g below (found with the telescoper, d = 1);
* P-generator p with sigma(p) = alpha*p: refuted iff sigma(g) = alpha^m g for
  some m != 0;
* A-generator y of order lam: refuted iff sigma(g) = alpha^m g for some
  0 < m < lam.

For the multiplicative cases a solution may be taken of the form
w * y_1^xi_1 ... p_r^pi_r with w in K(x)*, so the search reduces to a
multiplicative telescoping problem over K(x) intersected with the integer
kernel of the exponent balance on the P-generators.

A refutation comes with a constant c outside K and a generator h of a proper
difference ideal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import gcd

from flint import fmpz_mat

from .arith import root_of_unity_order
from .base import _integer_kernel, solve_pmt
from .embed import EmbeddingError, EvaluationContext, L_of, evaluate
from .telescope import solve_ptdr
from .tower import REFUTED, UNVERIFIED, VERIFIED, RingElement, Tower, TowerError, is_unit, render

log = logging.getLogger(__name__)


@dataclass
class MonomialCheck:
    """Outcome of one generator test.  ``m`` is None for the additive case."""
    kind: str
    independent: bool
    g: RingElement | None = None
    m: int | None = None
    fast_path: str | None = None

    def __bool__(self):
        return self.independent


# -- sums ------------------------------------------------------------------------------

def check_sigma_monomial(T, beta, normalize=True, strategy=None):
    """Is t with sigma(t) = t + beta (beta in T) an S-monomial over T?

    On refutation the witness g satisfies sigma(g) = g + beta.  With
    ``normalize`` the free additive constant is fixed so that t - g vanishes
    under the default embedding.
    """
    _require_usable(T)
    beta = T.lift(beta) if isinstance(beta, RingElement) else T(beta)
    if not beta:
        return MonomialCheck("sigma", False, T.zero)
    rows = solve_ptdr(T, [beta], strategy=strategy)
    for c, g in rows:
        if c[0]:
            g = g.scale(T.F.one / c[0])
            if normalize:
                g = _normalize_sum_witness(T, beta, g)
            if T.sigma(g) - g != beta:
                raise AssertionError("sigma witness failed re-substitution")
            return MonomialCheck("sigma", False, g)
    return MonomialCheck("sigma", True)


def _normalize_sum_witness(T, beta, g):
    try:
        T1 = T.adjoin_S("_t", beta)
        ctx = EvaluationContext.for_tower(T1)
        k0 = max(L_of(ctx, g), ctx.data[-1].r - 1)
        shift = evaluate(ctx, T1.gen(len(T)), k0) - evaluate(ctx, g, k0)
    except (EmbeddingError, TowerError) as exc:
        log.debug("witness constant left as found: %s", exc)
        return g
    return g + shift


# -- products and roots of unity ----------------------------------------------------------

def _unit_shape(T, alpha):
    """(u, exponent vector) of a unit monomial u*prod p_j^e_j free of A/S."""
    alpha = T.lift(alpha) if isinstance(alpha, RingElement) else T(alpha)
    if len(alpha.terms) != 1:
        raise TowerError("multiplicand must be a unit monomial w * p_1^e_1 ... p_r^e_r")
    (e, u), = alpha.terms.items()
    for i, v in enumerate(e):
        if v and T.gens[i].kind != "P":
            raise TowerError("multiplicand must be free of A- and S-generators")
    return u, e


def _mult_search(T, u, e):
    """Least d > 0 with sigma(g) = (u p^e)^d g for some g != 0, with that g, or None."""
    ppos = [i for i, g in enumerate(T.gens) if g.kind == "P"]
    apos = list(T.a_pos)
    pdata = [_unit_shape(T, T.gens[i].alpha) for i in ppos]
    fs = [u] + [c for c, _ in pdata] + [T.gens[i].alpha for i in apos]
    lattice = list(solve_pmt(fs))
    if not lattice:
        return None
    # exponent balance on the P-generators: z0*E(alpha) + sum z_j*E(alpha_j) = 0
    balance = []
    for i in ppos:
        row = []
        for z, _ in lattice:
            v = z[0] * e[i]
            for j, (_, ej) in enumerate(pdata):
                v += z[1 + j] * ej[i]
            row.append(v)
        balance.append(row)
    ker = _integer_kernel(balance, len(lattice)) if balance else [
        [1 if a == b else 0 for b in range(len(lattice))] for a in range(len(lattice))]
    if not ker:
        return None
    rows = [[sum(a * z[0] for a, (z, _) in zip(k, lattice))] + list(k) for k in ker]
    if not any(r[0] for r in rows):
        return None
    H = fmpz_mat(rows).hnf()
    top = [int(H[0, j]) for j in range(H.ncols())]
    d, coeffs = top[0], top[1:]
    if d <= 0:
        raise AssertionError("Hermite form lost the m-coordinate")
    z = [sum(a * zz[i] for a, (zz, _) in zip(coeffs, lattice)) for i in range(len(fs))]
    w = T.F.one
    for a, (_, wb) in zip(coeffs, lattice):
        if a:
            w = w * wb ** a
    exps = [0] * len(T.gens)
    for j, i in enumerate(ppos):
        exps[i] = -z[1 + j]
    for j, i in enumerate(apos):
        exps[i] = -z[1 + len(ppos) + j]
    g = T.monomial(exps, w)
    alpha = T.monomial(e, u)
    if T.sigma(g) != alpha ** d * g:
        raise AssertionError("multiplicative witness failed re-substitution")
    return d, g


def check_pi_monomial(T, alpha):
    """Is p with sigma(p) = alpha*p a P-monomial over T?  Witness: least m > 0."""
    _require_usable(T)
    u, e = _unit_shape(T, alpha)
    found = _mult_search(T, u, e)
    if found is None:
        return MonomialCheck("pi", True)
    m, g = found
    return MonomialCheck("pi", False, g, m)


def check_r_monomial(T, alpha, lam):
    """Is y with sigma(y) = alpha*y, y^lam = 1, an R-monomial over T?

    On refutation m is the largest admissible exponent in 1..lam-1, i.e. the
    one giving the smallest power of y in the constant g*y^(lam-m).
    """
    _require_usable(T)
    alpha = T.F(alpha)
    if not alpha.is_constant() or not (alpha ** lam).is_one():
        raise TowerError(f"alpha is not a root of unity of order dividing {lam}")
    order = root_of_unity_order(alpha)
    if not T.gens:
        if order == lam:
            return MonomialCheck("r", True, fast_path="primitive")
        return MonomialCheck("r", False, T.one, lam - order, fast_path="primitive")
    if _coprime_a_only(T, lam) and order == lam:
        return MonomialCheck("r", True, fast_path="coprime")
    found = _mult_search(T, alpha, T.zero_exp)
    d, g = found if found is not None else (lam, None)
    if lam % d:
        raise AssertionError("m-lattice does not contain the order")
    if d == lam:
        return MonomialCheck("r", True)
    m = lam - d
    g = g ** -1
    if T.sigma(g) != g.scale(alpha ** m):
        raise AssertionError("R witness failed re-substitution")
    return MonomialCheck("r", False, g, m)


def _coprime_a_only(T, lam):
    orders = [lam]
    for g in T.gens:
        if g.kind != "A" or root_of_unity_order(g.alpha) != g.order:
            return False
        orders.append(g.order)
    return all(gcd(a, b) == 1 for i, a in enumerate(orders) for b in orders[i + 1:])


def _require_usable(T):
    if REFUTED in T.status:
        raise TowerError("sub-tower contains a refuted generator; constants are not K")


# -- constants and ideals -----------------------------------------------------------------

@dataclass
class ConstantWitness:
    c: RingElement       # sigma(c) = c, c not in K
    h: RingElement       # sigma(h) = h, h != 0 not a unit: hE is a proper difference ideal


def build_constant_witness(kind, T, index, witness):
    """Constant and ideal generator for the refuted generator at ``index`` of T.

    ``witness`` is g (kind "sigma") or (m, g) (kinds "pi", "r").
    """
    t = T.gen(index)
    if kind == "sigma":
        g = T.lift(witness)
        c = t - g
        h = c
    elif kind in ("pi", "r"):
        m, g = witness
        g = T.lift(g)
        if kind == "pi":
            c = g * t ** (-m)
        else:
            lam = T.gens[index].order
            c = g * t ** (lam - m)
        h = T.one - c
    else:
        raise ValueError(f"unknown witness kind {kind!r}")
    if T.sigma(c) != c:
        raise AssertionError("witness is not a constant")
    if c.free_of(index):
        raise AssertionError("witness constant does not involve the new generator")
    if c.is_constant():
        raise AssertionError("witness constant lies in K")
    if not h or is_unit(T, h, check_verified=False)[0]:
        raise AssertionError("ideal generator is zero or a unit")
    if T.sigma(h) != h:
        raise AssertionError("ideal generator is not sigma-invariant")
    return ConstantWitness(c, h)


# -- full verification --------------------------------------------------------------------

VERDICT = {"S": "sigma-ok", "P": "pi-ok", "A": "r-ok"}
KIND = {"S": "sigma", "P": "pi", "A": "r"}


@dataclass
class GeneratorVerdict:
    name: str
    kind: str
    verdict: str                 # sigma-ok | pi-ok | r-ok | refuted | unverified
    m: int | None = None
    g: RingElement | None = None
    witness: ConstantWitness | None = None
    fast_path: str | None = None

    def record(self):
        out = {"generator": self.name, "kind": self.kind, "verdict": self.verdict}
        if self.m is not None:
            out["m"] = self.m
        if self.g is not None:
            out["g"] = render(self.g)
        if self.witness is not None:
            out["constant"] = render(self.witness.c)
            out["ideal"] = render(self.witness.h)
        if self.fast_path:
            out["fast_path"] = self.fast_path
        return out


@dataclass
class VerificationReport:
    tower: Tower
    entries: list = field(default_factory=list)

    @property
    def ok(self):
        return all(e.verdict.endswith("-ok") for e in self.entries)

    def refuted(self):
        return next((e for e in self.entries if e.verdict == "refuted"), None)

    def records(self):
        return [e.record() for e in self.entries]

    def text(self):
        lines = []
        for e in self.entries:
            s = f"{e.name} [{e.kind}] {e.verdict}"
            if e.witness is not None:
                s += f"  constant: {render(e.witness.c)}  ideal: <{render(e.witness.h)}>"
            lines.append(s)
        lines.append("basic RPiSigma-extension" if self.ok else "not a basic RPiSigma-extension")
        return "\n".join(lines)

    __str__ = text


def check_generator(T, i, strategy=None):
    """MonomialCheck for generator i of T against T.prefix(i)."""
    sub = T.prefix(i)
    g = T.gens[i]
    if g.kind == "S":
        return check_sigma_monomial(sub, g.beta, strategy=strategy)
    if g.kind == "P":
        return check_pi_monomial(sub, g.alpha)
    return check_r_monomial(sub, g.alpha, g.order)


def verify_tower(T, strategy=None, cross_check=False):
    """(tower with updated status, VerificationReport).

    Stops at the first refuted generator; the later ones stay unverified.
    With ``cross_check`` every accepted generator is re-examined by asking the
    telescoper for constants of the extended ring.
    """
    status = list(T.status)
    report = VerificationReport(T)
    for i, g in enumerate(T.gens):
        sub = T.prefix(i).with_status(status[:i])
        res = _check_in(sub, g, strategy)
        if res.independent:
            status[i] = VERIFIED
            report.entries.append(GeneratorVerdict(g.name, g.kind, VERDICT[g.kind], fast_path=res.fast_path))
            if cross_check:
                _cross_check(T.prefix(i + 1).with_status(status[:i + 1]), strategy)
            continue
        status[i] = REFUTED
        full = T.prefix(i + 1)
        data = res.g if g.kind == "S" else (res.m, res.g)
        w = build_constant_witness(KIND[g.kind], full, i, data)
        report.entries.append(GeneratorVerdict(g.name, g.kind, "refuted", res.m, res.g, w))
        for j in range(i + 1, len(T.gens)):
            status[j] = UNVERIFIED
            report.entries.append(GeneratorVerdict(T.gens[j].name, T.gens[j].kind, "unverified"))
        break
    T2 = T.with_status(status)
    report.tower = T2
    return T2, report


def _check_in(sub, g, strategy):
    if g.kind == "S":
        return check_sigma_monomial(sub, sub.lift(g.beta), strategy=strategy)
    if g.kind == "P":
        return check_pi_monomial(sub, sub.lift(g.alpha))
    return check_r_monomial(sub, g.alpha, g.order)


def _cross_check(T, strategy):
    rows = solve_ptdr(T, [T.zero], strategy=strategy)
    for _, g in rows:
        if not g.is_constant():
            raise AssertionError(f"cross-check: {render(g)} is a constant outside K")


# -- merging A-generators ------------------------------------------------------------------

def _bezout(values):
    """(g, coeffs) with g = gcd(values) = sum coeffs_i * values_i."""
    g, coeffs = 0, []
    for v in values:
        if g == 0:
            g, coeffs = abs(v), [1 if v >= 0 else -1]
            continue
        a, b, s0, s1, t0, t1 = g, v, 1, 0, 0, 1
        while b:
            q = a // b
            a, b = b, a - q * b
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if a < 0:
            a, s0, t0 = -a, -s0, -t0
        coeffs = [s0 * c for c in coeffs] + [t0]
        g = a
    return g, coeffs


@dataclass
class MergeMap:
    """tau: several A-generators -> one of order lam = prod lam_i, t_i -> t^r_i."""
    source: Tower
    target: Tower
    positions: list              # A-positions in the source
    orders: list
    lam: int
    alpha: object
    r: list
    d: int                       # gcd of the r_i
    mu: int                      # mu*d + nu*lam = 1
    nu: int
    a_tilde: list                # d = sum a_tilde_i * r_i

    def _index_map(self):
        return [i for i in range(len(self.source.gens)) if i not in self.positions[1:]]

    def forward(self, f):
        f = self.source.lift(f)
        return RingElement(self.target, _merge_terms(self, f, self._index_map()))

    def backward(self, f):
        f = self.target.lift(f)
        keep = self._index_map()
        n = len(self.source.gens)
        out = {}
        for e, c in f.terms.items():
            ne = [0] * n
            for j, i in enumerate(keep):
                ne[i] = e[j]
            a = e[keep.index(self.positions[0])]
            for i, lam_i, at in zip(self.positions, self.orders, self.a_tilde):
                v = (a * self.mu * at) % lam_i
                if v != a % lam_i:
                    raise AssertionError("inverse merge map disagrees with the residues")
                ne[i] = v
            ne = tuple(ne)
            out[ne] = out[ne] + c if ne in out else c
        return RingElement(self.source, {k: v for k, v in out.items() if v})


def merge_a_monomials(T, name=None):
    """(tower with a single A-generator, MergeMap).

    The merged generator takes the place of the first A-generator.
    """
    pos = list(T.a_pos)
    orders = [T.gens[i].order for i in pos]
    if len(pos) <= 1:
        lam = orders[0] if orders else 1
        alpha = T.gens[pos[0]].alpha if pos else T.F.one
        return T, MergeMap(T, T, pos, orders, lam, alpha, [1] * len(pos), 1, 1, 0, [1] * len(pos))
    for i, a in enumerate(orders):
        for b in orders[i + 1:]:
            if gcd(a, b) != 1:
                raise TowerError(f"orders {a} and {b} are not coprime: several R-monomials "
                                 "merge only for pairwise coprime orders")
    for i in pos:
        g = T.gens[i]
        if root_of_unity_order(g.alpha) != g.order:
            raise TowerError(f"{g.name}: multiplicand is not a primitive root of order {g.order}")
    lam = 1
    for o in orders:
        lam *= o
    alpha = T.F.one
    for i in pos:
        alpha = alpha * T.gens[i].alpha
    r = []
    for o in orders:
        u = pow(lam // o, -1, o)
        r.append(u * lam // o)
    for i, ri in zip(pos, r):
        if alpha ** ri != T.gens[i].alpha:
            raise AssertionError("merge exponent incompatible with sigma")
    d, a_tilde = _bezout(r)
    mu = pow(d, -1, lam)
    nu = (1 - mu * d) // lam
    if mu * d + nu * lam != 1:
        raise AssertionError("Bezout data for the inverse merge map")

    M = MergeMap(T, None, pos, orders, lam, alpha, r, d, mu, nu, a_tilde)
    keep = M._index_map()
    T2 = Tower(T.F, (), T.step)
    status = []
    for i in keep:
        g = T.gens[i]
        if i == pos[0]:
            T2 = T2.adjoin_A(name or g.name, lam, alpha)
            st = [T.status[j] for j in pos]
        else:
            data = T.prefix(i).lift(g.alpha if g.kind == "P" else g.beta)
            img = RingElement(T2, _merge_terms(M, data, [j for j in keep if j < i]))
            T2 = T2.adjoin_P(g.name, img) if g.kind == "P" else T2.adjoin_S(g.name, img)
            st = [T.status[i]]
        status.append(VERIFIED if all(s == VERIFIED for s in st) else UNVERIFIED)
    M.target = T2.with_status(status)
    for i in pos:
        if M.target.sigma(M.forward(T.gen(i))) != M.forward(T.sigma(T.gen(i))):
            raise AssertionError("merge map does not commute with sigma")
    return M.target, M


def _merge_terms(M, f, cols):
    out = {}
    for e, c in f.terms.items():
        a = sum(e[i] * ri for i, ri in zip(M.positions, M.r) if i < len(e)) % M.lam
        ne = tuple(a if i == M.positions[0] else e[i] for i in cols)
        out[ne] = out[ne] + c if ne in out else c
    return {k: v for k, v in out.items() if v}


# -- maximal difference ideals for sum blocks ---------------------------------------------

@dataclass
class QuotientPresentation:
    """E = A[t_start..] modulo I = <t_ij - g_j>, isomorphic to A[s_1..s_r]."""
    source: Tower
    start: int
    ideal: list          # (index in source, g_j in source)
    target: Tower        # A plus the replacement sum generators
    table: dict          # name of t_k -> mu(t_k + I) in target
    inverse: dict        # name of s_j -> element of source

    def generators(self):
        return [self.source.gen(i) - g for i, g in self.ideal]

    def mu(self, f):
        return _substitute(self.source, f, self.target, self.start,
                           [self.table[g.name] for g in self.source.gens[self.start:]])

    def mu_inverse(self, f):
        return _substitute(self.target, f, self.source, self.start,
                           [self.inverse[g.name] for g in self.target.gens[self.start:]])

    def reduces_to_zero(self, f):
        return not self.mu(f)

    def text(self):
        out = ["ideal: <" + ", ".join(render(h) for h in self.generators()) + ">"]
        for g in self.target.gens[self.start:]:
            out.append(f"sigma({g.name}) = {g.name} + {render(g.beta)}")
        for name, v in self.table.items():
            out.append(f"mu({name}) = {render(v)}")
        return "\n".join(out)


def _substitute(S, f, D, start, images):
    """Image of f in D with the generators from ``start`` on replaced by ``images``."""
    f = S.lift(f)
    cache = {}
    out = D.zero
    for e, c in f.terms.items():
        head = tuple(e[:start]) + (0,) * (len(D.gens) - start)
        term = RingElement(D, {head: c})
        for j, v in enumerate(e[start:]):
            if v:
                if v < 0:
                    raise TowerError("sum generators occur with non-negative exponents only")
                key = (j, v)
                if key not in cache:
                    cache[key] = D.lift(images[j]) ** v
                term = term * cache[key]
        out = out + term
    return out


def construct_maximal_sigma_ideal(T, start, constants=None, strategy=None):
    """Maximal reflexive difference ideal of the sum block T.gens[start:].

    ``constants`` maps generator names to the free constant c in K added to
    mu(t + I) (default 0).  Case-1 witnesses are first normalized so that the
    ideal generator vanishes under the default embedding of T.
    """
    constants = constants or {}
    A = T.prefix(start)
    _require_usable(A)
    for g in T.gens[start:]:
        if g.kind != "S":
            raise TowerError("the block above the base must consist of S-generators")
    S = A
    table, inverse, ideal = {}, {}, []
    for idx in range(start, len(T.gens)):
        g = T.gens[idx]
        E = T.prefix(idx)
        images = [table[h.name] for h in T.gens[start:idx]]
        b = _substitute(E, g.beta, S, start, images)
        rows = solve_ptdr(S, [b], strategy=strategy)
        cst = T.F(constants.get(g.name, 0))
        sol = next(((c, w) for c, w in rows if c[0]), None)
        if sol is not None:
            w = sol[1].scale(T.F.one / sol[0][0])
            back = _substitute(S, w, E, start, [inverse[h.name] for h in S.gens[start:]])
            back = _normalize_block_witness(T, idx, back)
            gj = back + cst
            ideal.append((idx, gj))
            table[g.name] = _substitute(E, gj, S, start, images)
        else:
            name = _fresh_name(T, S)
            S = S.adjoin_S(name, b)
            table = {k: S.lift(v) for k, v in table.items()}
            table[g.name] = S.gen(name) + cst
            inverse[name] = T.prefix(idx + 1).gen(idx) - cst
    table = {k: S.lift(v) for k, v in table.items()}
    inverse = {k: T.lift(v) for k, v in inverse.items()}
    Q = QuotientPresentation(T, start, [(i, T.lift(g)) for i, g in ideal],
                             S.with_status(list(A.status) + [UNVERIFIED] * (len(S.gens) - start)),
                             table, inverse)
    _check_presentation(Q)
    return Q


def _fresh_name(T, S):
    taken = set(T.names) | set(S.names)
    j = 1
    while f"s{j}" in taken:
        j += 1
    return f"s{j}"


def _normalize_block_witness(T, idx, g):
    try:
        T1 = T.prefix(idx + 1)
        ctx = EvaluationContext.for_tower(T1)
        k0 = max(L_of(ctx, g), ctx.data[idx].r - 1)
        return g + (evaluate(ctx, T1.gen(idx), k0) - evaluate(ctx, g, k0))
    except EmbeddingError as exc:
        log.debug("block witness constant left as found: %s", exc)
        return g


def _check_presentation(Q):
    T, S = Q.source, Q.target
    for h in Q.generators():
        if Q.mu(h):
            raise AssertionError("ideal generator not mapped to zero")
        for j in (1, -1):
            if Q.mu(T.sigma(h, j)):
                raise AssertionError("ideal not closed under sigma and its inverse")
    for g in T.gens[Q.start:]:
        t = T.gen(g.name)
        if Q.mu(T.sigma(t)) != S.sigma(Q.table[g.name]):
            raise AssertionError(f"mu does not commute with sigma on {g.name}")
    for g in S.gens[Q.start:]:
        if Q.mu(Q.inverse[g.name]) != S.gen(g.name):
            raise AssertionError("inverse table is not inverse to mu")
