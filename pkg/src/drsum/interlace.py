"""Idempotent decomposition along a root-of-unity generator.

For an A-generator y of order n with sigma(y) = alpha*y put

    e_s = prod_{j != n-1-s} (y - alpha^j) / prod_{j != n-1-s} (alpha^(n-1-s) - alpha^j).

Then e_s(alpha^i) = [i == n-1-s], the e_s are orthogonal idempotents summing
to 1, and sigma(e_s) = e_{s+1 mod n}.  Every f splits as sum e_s f_s with
f_s = f|_{y -> alpha^(n-1-s)} free of y, and the component rings carry the
automorphisms sigma_s(f) = sigma^n(f)|_{y -> alpha^(n-1-s)}.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import root_of_unity_order
from .tower import RingElement, Tower, TowerError, VERIFIED


@dataclass
class IdempotentBasis:
    n: int
    alpha: object
    elems: list  # e_s as coefficient lists [c_0, ..., c_{n-1}] in K

    def as_elements(self, T, pos):
        """The e_s as elements of tower T whose A-generator sits at ``pos``."""
        out = []
        for coeffs in self.elems:
            d = {}
            for i, c in enumerate(coeffs):
                if c:
                    e = [0] * len(T.gens)
                    e[pos] = i
                    d[tuple(e)] = c
            out.append(RingElement(T, d))
        return out


def _polymul_mod(a, b, n, K):
    out = [K.zero] * n
    for i, u in enumerate(a):
        if not u:
            continue
        for j, v in enumerate(b):
            if v:
                out[(i + j) % n] = out[(i + j) % n] + u * v
    return out


def _poly_eval(c, v):
    acc = v.F.zero
    for a in reversed(c):
        acc = acc * v + a
    return acc


def idempotents(n, alpha):
    """The idempotents e_0, ..., e_{n-1} for a primitive n-th root alpha."""
    K = alpha.F
    if n == 1:
        if not alpha.is_one():
            raise ValueError("alpha is not a primitive root of order 1")
        return IdempotentBasis(1, alpha, [[K.one]])
    if root_of_unity_order(alpha) != n:
        raise ValueError(f"alpha is not a primitive root of unity of order {n}")
    elems = []
    for s in range(n):
        u = n - 1 - s
        poly = [K.one]
        for j in range(n):
            if j != u:
                poly = _polymul_mod(poly, [-(alpha ** j), K.one], n, K)
        val = _poly_eval(poly, alpha ** u)
        inv = val.inverse()
        elems.append([c * inv for c in poly])
    B = IdempotentBasis(n, alpha, elems)
    _check_idempotents(B)
    return B


def _check_idempotents(B):
    n, K = B.n, B.alpha.F
    one = [K.one] + [K.zero] * (n - 1)
    total = [K.zero] * n
    for s, e in enumerate(B.elems):
        if _polymul_mod(e, e, n, K) != e:
            raise AssertionError("e_s is not idempotent")
        for t in range(s + 1, n):
            if any(_polymul_mod(e, B.elems[t], n, K)):
                raise AssertionError("idempotents are not orthogonal")
        total = [a + b for a, b in zip(total, e)]
        shifted = [c * B.alpha ** i for i, c in enumerate(e)]
        if shifted != B.elems[(s + 1) % n]:
            raise AssertionError("shift law e_s(alpha y) = e_{s+1} violated")
    if total != one:
        raise AssertionError("idempotents do not sum to one")


def _single_a(T):
    if len(T.a_pos) > 1:
        raise TowerError("several A-generators: merge them first")
    if not T.a_pos:
        return None, 1, None
    pos = T.a_pos[0]
    g = T.gens[pos]
    return pos, g.order, g.alpha


def a_idempotent(T, point):
    """The idempotent of T equal to 1 exactly at the A-assignment ``point``."""
    out = T.one
    for i, u in point:
        g = T.gens[i]
        B = idempotents(g.order, g.alpha)
        out = out * B.as_elements(T, i)[g.order - 1 - u]
    return out


# -- component rings ------------------------------------------------------------

@dataclass
class ComponentRing:
    s: int
    tower: Tower          # generators without y, sigma_s, step n
    keep: list            # indices of the original generators kept

    def to_component(self, f):
        """y-free element of the original tower -> element of this ring."""
        d = {}
        for k, v in f.terms.items():
            d[tuple(k[i] for i in self.keep)] = v
        return RingElement(self.tower, d)

    def from_component(self, T, g):
        d = {}
        n = len(T.gens)
        for k, v in g.terms.items():
            e = [0] * n
            for j, i in enumerate(self.keep):
                e[i] = k[j]
            d[tuple(e)] = v
        return RingElement(T, d)


def _specialize_y(T, f, pos, value_exp):
    return T.specialize_a(f, ((pos, value_exp),)) if pos is not None else f


def component_automorphism(T, s):
    """The ring (E~, sigma_s) for component s."""
    cache = T.__dict__.setdefault("_components", {})
    if s in cache:
        return cache[s]
    pos, n, alpha = _single_a(T)
    keep = [i for i in range(len(T.gens)) if i != pos]
    if pos is None:
        ring = ComponentRing(0, T, keep)
        cache[s] = ring
        return ring
    u = n - 1 - s
    Ts = Tower(T.F, (), T.step * n)
    ring = ComponentRing(s, Ts, keep)
    for j, i in enumerate(keep):
        g = T.gens[i]
        t = T.gen(i)
        img = T.sigma(t, n)
        if g.kind == "P":
            tilde = _specialize_y(T, img, pos, u)
            (e, c), = tilde.terms.items()
            e = list(e)
            e[i] -= 1
            alpha_t = RingElement(T, {tuple(e): c})
            Ts = Ts.adjoin_P(g.name, _to_prefix(ring, Ts, alpha_t, keep[:j]))
        else:
            beta_t = _specialize_y(T, img - t, pos, u)
            Ts = Ts.adjoin_S(g.name, _to_prefix(ring, Ts, beta_t, keep[:j]))
        ring = ComponentRing(s, Ts, keep)
    status = [VERIFIED if T.is_verified() else T.status[i] for i in keep]
    ring = ComponentRing(s, Ts.with_status(status), keep)
    cache[s] = ring
    return ring


def _to_prefix(ring, Ts, f, keep):
    d = {}
    for k, v in f.terms.items():
        if any(k[i] for i in range(len(k)) if i not in keep):
            raise TowerError("component data depends on later generators")
        d[tuple(k[i] for i in keep)] = v
    return RingElement(Ts, d)


def decompose(T, f):
    """Components [f_0, ..., f_{n-1}], f_s = f|_{y -> alpha^(n-1-s)} in (E~, sigma_s)."""
    pos, n, _ = _single_a(T)
    f = T.lift(f) if f.T is not T else f
    out = []
    for s in range(n):
        ring = component_automorphism(T, s)
        out.append(ring.to_component(_specialize_y(T, f, pos, n - 1 - s)))
    return out


def recompose(T, comps):
    """sum e_s f_s as an element of T."""
    pos, n, alpha = _single_a(T)
    if pos is None:
        return component_automorphism(T, 0).from_component(T, comps[0])
    es = idempotents(n, alpha).as_elements(T, pos)
    out = T.zero
    for s, c in enumerate(comps):
        ring = component_automorphism(T, s)
        out = out + es[s] * ring.from_component(T, c)
    return out


def sigma_on_components(T, comps, j=1):
    """Components of sigma^j(f) given the components of f."""
    pos, n, _ = _single_a(T)
    comps = list(comps)
    for _ in range(abs(j)):
        new = []
        for i in range(n):
            src = (i - 1) % n if j > 0 else (i + 1) % n
            ring_src = component_automorphism(T, src)
            lifted = ring_src.from_component(T, comps[src])
            img = T.sigma(lifted, 1 if j > 0 else -1)
            ring = component_automorphism(T, i)
            new.append(ring.to_component(_specialize_y(T, img, pos, n - 1 - i)))
        comps = new
    return comps


def subsequence_map(s, n, seq):
    """lambda_s: the entries a_{n r + (n-1-s)}, r = 0, 1, ..."""
    return list(seq[n - 1 - s::n])
