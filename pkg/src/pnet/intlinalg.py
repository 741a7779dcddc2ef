"""Small exact linear-algebra helpers over the integers and rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def transpose(rows: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matvec(rows: Sequence[Sequence[int]], x: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(r, x)) for r in rows)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def det(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant; det of the 0x0 matrix is 1."""
    n = len(rows)
    a = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def row_basis(rows: Sequence[Sequence[int]]) -> list[int]:
    """Indices of the greedy first linearly independent rows."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    chosen = []
    for idx, r in enumerate(rows):
        v = [Fraction(e) for e in r]
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p] / b[p]
                v = [x - f * y for x, y in zip(v, b)]
        p = next((j for j, e in enumerate(v) if e), None)
        if p is not None:
            basis.append(v)
            pivots.append(p)
            chosen.append(idx)
    return chosen


def rank(rows: Sequence[Sequence[int]]) -> int:
    return len(row_basis(rows))


def solve_rational(rows: Sequence[Sequence[int]], rhs: Sequence[int]):
    """Return one rational solution of rows·x = rhs, or None if inconsistent."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[Fraction(e) for e in r] + [Fraction(c)] for r, c in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [e * inv for e in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(a[i][n] for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = a[i][n]
    return x


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def integer_solvable(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> bool:
    """Does rows·x = rhs have a solution x in Z^n?

    Unimodular column operations bring the matrix to lower echelon form,
    after which the substituted unknowns are read off row by row.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    z: list[int] = []
    col = 0
    for i in range(m):
        for j in range(col + 1, n):
            if a[i][j]:
                g, s, t = xgcd(a[i][col], a[i][j])
                u, v = a[i][j] // g, a[i][col] // g
                for r in a:
                    x, y = r[col], r[j]
                    r[col], r[j] = s * x + t * y, -u * x + v * y
        known = sum(a[i][k] * z[k] for k in range(col))
        if col < n and a[i][col]:
            q, rem = divmod(rhs[i] - known, a[i][col])
            if rem:
                return False
            z.append(q)
            col += 1
        elif known != rhs[i]:
            return False
    return True


def fm_feasible(rows: Sequence[Sequence[int]], rhs: Sequence[int], nonneg: bool = True,
                max_rows: int = 5000) -> bool:
    """Rational feasibility of rows·x >= rhs (and x >= 0) by Fourier-Motzkin.

    Returns True when the row count would exceed max_rows, so False is
    always a proof of infeasibility.
    """
    n = len(rows[0]) if rows else 0
    cur = {(tuple(r), c) for r, c in zip(rows, rhs)}
    if nonneg:
        cur |= {(tuple(int(i == j) for i in range(n)), 0) for j in range(n)}
    for j in range(n):
        pos = [(r, c) for r, c in cur if r[j] > 0]
        neg = [(r, c) for r, c in cur if r[j] < 0]
        nxt = {(r, c) for r, c in cur if r[j] == 0}
        if len(nxt) + len(pos) * len(neg) > max_rows:
            return True
        for rp, cp in pos:
            for rn, cn in neg:
                al, be = rp[j], -rn[j]
                r = tuple(be * x + al * y for x, y in zip(rp, rn))
                c = be * cp + al * cn
                g = 0
                for e in r:
                    g = gcd(g, e)
                if g > 1:
                    # rational scaling keeps the same solution set
                    nxt.add((tuple(e // g for e in r), Fraction(c, g)))
                else:
                    nxt.add((r, c))
        cur = nxt
    return all(c <= 0 for _, c in cur)
