"""Exact linear algebra over the constant field K."""

from __future__ import annotations


from .arith import GroundFieldElement, split_x


def _size(e):
    return len(e.num.monoms()) + len(e.den.monoms())


def rref(rows, ncols):
    """Reduced row echelon form; returns (rows, pivot columns).  Zero rows dropped."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(A)):
            if A[i][c]:
                s = _size(A[i][c])
                if best is None or s < best[0]:
                    best = (s, i)
        if best is None:
            continue
        i = best[1]
        A[r], A[i] = A[i], A[r]
        inv = A[r][c].inverse()
        A[r] = [v * inv if v else v for v in A[r]]
        for j in range(len(A)):
            if j != r and A[j][c]:
                f = A[j][c]
                A[j] = [a - f * b if b else a for a, b in zip(A[j], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def nullspace(rows, ncols, K):
    """Basis of {v in K^ncols : rows * v = 0}."""
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [K.zero] * ncols
        v[f] = K.one
        for row, p in zip(R, piv):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def _poly_den_lcm(elems):
    D = None
    for e in elems:
        if e.is_zero():
            continue
        if D is None:
            D = e.den
        elif D != e.den:
            D = D * (e.den / D.gcd(e.den))
    return D


def field_equations(columns, K):
    """Turn K-linear conditions on elements of K(x) into rows over K.

    ``columns`` is a list of d elements (one per unknown); the returned rows
    express sum(lambda_i * columns[i]) == 0 coefficientwise in x.
    """
    D = _poly_den_lcm(columns)
    if D is None:
        return []
    parts = []
    keys = set()
    for e in columns:
        if e.is_zero():
            parts.append({})
            continue
        P = e.num * (D / e.den) if e.den != D else e.num
        sp = split_x(P)
        parts.append(sp)
        keys.update(sp)
    rows = []
    for j in sorted(keys):
        rows.append([GroundFieldElement._raw(K, p[j], K.ctx.constant(1)) if j in p else K.zero
                     for p in parts])
    return rows


def vector_equations(vectors, K):
    """Rows over K for sum(lambda_i * vectors[i]) == 0.

    Each vector is a mapping key -> element of K(x).
    """
    keys = set()
    for v in vectors:
        keys.update(v)
    rows = []
    for k in keys:
        rows.extend(field_equations([v.get(k, K.zero) for v in vectors], K))
    return rows


def linear_relations(vectors, K):
    """Basis of K-linear relations among mappings key -> K(x)."""
    rows = vector_equations(vectors, K)
    return nullspace(rows, len(vectors), K)
