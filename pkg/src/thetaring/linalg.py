"""Exact linear algebra over Q and Z.

Matrices are lists of rows; vectors are tuples.  Everything stays in
``int`` or ``Fraction`` so results are reproducible bit for bit.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = list


def vec(v) -> tuple:
    return tuple(int(x) for x in v)


def add(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v) -> tuple:
    return tuple(c * a for a in v)


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def zero(n: int) -> tuple:
    return (0,) * n


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> list:
    if not m:
        return [() for _ in range(ncols or 0)]
    return [tuple(row[j] for row in m) for j in range(len(m[0]))]


def matvec(m: Sequence[Sequence], v) -> tuple:
    return tuple(dot(row, v) for row in m)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    bt = transpose(b)
    return [tuple(dot(row, col) for col in bt) for row in a]


def primitive(v) -> tuple:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    rows = [r for r in rows if any(x != 0 for x in r)]
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    """Integer basis of {x : rows x = 0}."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -red[i][f]
        basis.append(primitive(x))
    return basis


def solve(rows: Sequence[Sequence], b: Sequence, ncols: int | None = None):
    """One rational solution of rows x = b, or None if inconsistent."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    if not aug:
        return tuple(Fraction(0) for _ in range(ncols))
    red, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(piv):
        x[p] = red[i][ncols]
    return tuple(x)


def det(m: Sequence[Sequence]):
    n = len(m)
    a = [[Fraction(x) for x in r] for r in m]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return int(d) if d.denominator == 1 else d


def in_span(v, rows) -> bool:
    return rank(list(rows) + [v]) == rank(rows)


# -- integer lattices ---------------------------------------------------------

def hnf(rows: Sequence[Sequence], ncols: int | None = None) -> list:
    """Row Hermite normal form: a canonical basis of the lattice spanned by rows."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    m = [list(map(int, r)) for r in rows if any(r)]
    out = []
    for col in range(ncols):
        if not m:
            break
        while True:
            nz = [r for r in m if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            m = [piv] + [[a - (r[col] // piv[col]) * b for a, b in zip(r, piv)] if r[col] else r
                         for r in m if r is not piv]
            m = [r for r in m if any(r)]
        nz = [r for r in m if r[col] != 0]
        if not nz:
            continue
        piv = nz[0]
        m = [r for r in m if r is not piv]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
    for i, row in enumerate(out):
        p = next(j for j, x in enumerate(row) if x != 0)
        for k in range(i):
            q = out[k][p] // row[p]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], row)]
    return [tuple(r) for r in out]


def lattice_coords(v, basis: Sequence[Sequence]):
    """Integer coordinates of v in a lattice basis, or None if v is outside."""
    if not basis:
        return () if is_zero(v) else None
    x = solve(transpose(basis), list(v), len(basis))
    if x is None or any(c.denominator != 1 for c in x):
        return None
    return tuple(int(c) for c in x)


def smith(m: Sequence[Sequence]):
    """Smith normal form. Returns (U, D, V) with U m V = D, U and V unimodular."""
    a = [list(map(int, r)) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    t = 0
    while t < min(nr, nc):
        entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility condition
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                add_row(t, bad[0], -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, a, V


def int_kernel(rows: Sequence[Sequence], ncols: int) -> list:
    """Z-basis (in HNF) of {x in Z^n : rows x = 0}."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    _, d, v = smith(rows)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i] != 0)
    cols = [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]
    return hnf(cols, ncols)


def saturated_basis(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of the saturation (span_Q rows) ∩ Z^n."""
    if rank(rows) == 0:
        return []
    return int_kernel(nullspace(rows, ncols), ncols)
