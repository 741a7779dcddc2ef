"""Minimal nonnegative solutions of integer linear systems.

The engine is a completion procedure in the style of Pottier and
Contejean-Devie: candidate vectors are grown one unit at a time in order of
increasing |x|_1, only along directions that move Bx back towards zero
(<Bx, Be_j> < 0), and candidates dominating a known solution are pruned.
Every other operation in this module reduces to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from . import bounds
from .errors import BudgetExceeded, InputError, MembershipError, PnetError
from .intlinalg import dot, rank, row_basis
from .net import Vector, l1, leq, vnorm

DEFAULT_FRONTIER_BUDGET = 10 ** 6
# above this entry size the search switches to Python integers
NUMPY_ENTRY_LIMIT = 2 ** 20


class BoundViolation(PnetError):
    """A computed result exceeded the bound it is proven to satisfy."""


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if any(len(r) != self.ncols for r in rows):
            raise InputError("matrix rows must all have length ncols")
        object.__setattr__(self, "rows", rows)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    @property
    def norm(self) -> int:
        return max((abs(e) for r in self.rows for e in r), default=0)

    @property
    def l1_norm(self) -> int:
        # |B|_1 is the largest l1-norm of a row
        return max((l1(r) for r in self.rows), default=0)


def as_matrix(B, ncols: Optional[int] = None) -> IntMatrix:
    if isinstance(B, IntMatrix):
        return B
    rows = [tuple(r) for r in B]
    if ncols is None:
        if not rows:
            raise InputError("column count of an empty matrix must be given")
        ncols = len(rows[0])
    return IntMatrix(tuple(rows), ncols)


def canonical(vectors: Iterable[Sequence[int]]) -> list[Vector]:
    """Deduplicate and sort lexicographically."""
    return sorted({tuple(v) for v in vectors})


def minimal_elements(vectors: Iterable[Sequence[int]]) -> list[Vector]:
    vs = sorted({tuple(v) for v in vectors}, key=lambda v: (sum(v), v))
    out: list[Vector] = []
    for v in vs:
        if not any(leq(u, v) for u in out):
            out.append(v)
    return sorted(out)


def _completion(cols: list[tuple[int, ...]], caps: Sequence[Optional[int]],
                budget: int, stop=None) -> list[Vector]:
    """Minimal nonzero x in N^n with sum_j x_j cols[j] = 0 and x_j <= caps[j].

    Capping a coordinate is sound: every minimal solution within the caps is
    reached by a path of candidates below it.  stop(basis) may end the
    search early after any level that found solutions.
    """
    if not cols:
        return []
    caps = _forced_zero_caps(cols, caps)
    if max((abs(v) for c in cols for v in c), default=0) <= NUMPY_ENTRY_LIMIT:
        return _completion_np(cols, caps, budget, stop)
    return _completion_exact(cols, caps, budget, stop)


# multiplier range tried per row count when looking for sign certificates
_CERT_RANGE = {1: 1, 2: 3, 3: 3, 4: 2, 5: 1, 6: 1}


def _forced_zero_caps(cols, caps) -> list[Optional[int]]:
    """Cap at 0 every variable that is zero in all solutions, when a small
    row combination y with y^T B >= 0 on the open columns proves it.

    Coordinates with a positive entry in such a combination must vanish.
    The search only tries multipliers in a small box, so it may miss
    certificates; it never caps a variable that some solution uses.
    """
    caps = list(caps)
    m = len(cols[0])
    if m not in _CERT_RANGE:
        return caps
    k = _CERT_RANGE[m]
    B = np.array(cols, dtype=object).T
    Y = np.array(list(product(range(-k, k + 1), repeat=m)), dtype=object)
    comb = Y @ B
    changed = True
    while changed:
        changed = False
        open_ = [j for j in range(len(cols)) if caps[j] != 0]
        if not open_:
            break
        sub = comb[:, open_]
        for row in sub[np.all(sub >= 0, axis=1)]:
            for j, v in zip(open_, row):
                if v > 0 and caps[j] != 0:
                    caps[j] = 0
                    changed = True
    return caps


def _completion_np(cols, caps, budget, stop) -> list[Vector]:
    """Vectorized level-by-level search; same candidates as the exact path."""
    n = len(cols)
    m = len(cols[0])
    Bc = np.array(cols, dtype=np.int64).reshape(n, m)
    cap = np.array([np.iinfo(np.int64).max if c is None else c for c in caps], dtype=np.int64)
    start = [j for j in range(n) if cap[j] >= 1]
    X = np.eye(n, dtype=np.int64)[start]
    BX = Bc[start]
    basis: list[Vector] = []
    basis_arr = np.zeros((0, n), dtype=np.int64)
    while len(X):
        hit = ~BX.any(axis=1)
        if hit.any():
            found = sorted(tuple(v) for v in X[hit].tolist())
            basis.extend(found)
            basis_arr = np.vstack([basis_arr, np.array(found, dtype=np.int64)])
            if stop is not None and stop(basis):
                break
            X, BX = X[~hit], BX[~hit]
        # extend along e_j only when <Bx, Be_j> < 0 and the cap allows
        rows, js = np.nonzero(((BX @ Bc.T) < 0) & (X < cap))
        if len(rows) == 0:
            break
        Y = X[rows]
        Y[np.arange(len(rows)), js] += 1
        BY = BX[rows] + Bc[js]
        Y, first = np.unique(Y, axis=0, return_index=True)
        BY = BY[first]
        if len(basis_arr):
            keep = np.ones(len(Y), dtype=bool)
            for b in basis_arr:
                keep &= ~np.all(Y >= b, axis=1)
            Y, BY = Y[keep], BY[keep]
        if len(Y) > budget:
            raise BudgetExceeded(
                f"Hilbert completion frontier exceeded {budget} candidates", budget)
        X, BX = Y, BY
    return sorted(basis)


def _completion_exact(cols, caps, budget, stop) -> list[Vector]:
    """Pure-integer search for entries too large for fixed-width arithmetic."""
    n = len(cols)
    m = len(cols[0]) if n else 0
    zero = (0,) * m
    basis: list[Vector] = []
    # by_coord[j][v]: basis elements b with b[j] == v.  Frontier vectors are
    # never dominated, so x + e_j can only be dominated by b with b[j] = x[j] + 1.
    by_coord: list[dict[int, list[Vector]]] = [{} for _ in range(n)]
    frontier: dict[Vector, tuple[int, ...]] = {}
    for j in range(n):
        if caps[j] is None or caps[j] >= 1:
            e = tuple(1 if i == j else 0 for i in range(n))
            frontier[e] = cols[j]
    while frontier:
        found = sorted(x for x, bx in frontier.items() if bx == zero)
        basis.extend(found)
        for b in found:
            for j in range(n):
                if b[j]:
                    by_coord[j].setdefault(b[j], []).append(b)
        if stop is not None and found and stop(basis):
            break
        nxt: dict[Vector, tuple[int, ...]] = {}
        for x, bx in frontier.items():
            if bx == zero:
                continue
            for j in range(n):
                if caps[j] is not None and x[j] >= caps[j]:
                    continue
                if dot(bx, cols[j]) >= 0:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt:
                    continue
                if any(all(p <= q for p, q in zip(b, y)) for b in by_coord[j].get(y[j], ())):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(bx, cols[j]))
            if len(nxt) > budget:
                raise BudgetExceeded(
                    f"Hilbert completion frontier exceeded {budget} candidates", budget)
        frontier = nxt
    return sorted(basis)


def hilbert_basis(B, ncols: Optional[int] = None, *,
                  budget: int = DEFAULT_FRONTIER_BUDGET, check: bool = True) -> list[Vector]:
    """min<=({x in N^n : Bx = 0} minus {0}) in lexicographic order."""
    B = as_matrix(B, ncols)
    cols = [B.column(j) for j in range(B.ncols)]
    X = _completion(cols, [None] * B.ncols, budget)
    if check and X:
        bound = bounds.eval_bound("pottier", {"l1": B.l1_norm, "r": rank(B.rows)})
        worst = max(l1(x) for x in X)
        if worst > bound:
            raise BoundViolation(f"Hilbert basis element with |x|_1={worst} > {bound}")
    return X


def reduced_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Primitive integer rows of the reduced echelon form: same kernel, fewer rows.

    The completion is complete for any matrix with the right kernel, and the
    echelon form usually keeps its frontier far smaller.
    """
    a = [[Fraction(e) for e in r] for r in rows]
    out = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [e / p for e in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    for row in a[:r]:
        den = 1
        for e in row:
            den = den * e.denominator // gcd(den, e.denominator)
        ints = [int(e * den) for e in row]
        g = 0
        for e in ints:
            g = gcd(g, e)
        out.append(tuple(e // g for e in ints))
    return out


def positive_support_solution(B, ncols: Optional[int] = None, coords=None, *,
                              budget: int = DEFAULT_FRONTIER_BUDGET) -> Optional[Vector]:
    """Some x in N^n with Bx = 0 and x_i >= 1 for every i in coords, or None.

    Sums Hilbert basis elements until the required coordinates are covered;
    the completion stops at the first level where that happens, so positive
    answers rarely need the whole basis.
    """
    B = as_matrix(B, ncols)
    n = B.ncols
    need = set(range(n) if coords is None else coords)
    if not need:
        return (0,) * n

    def covered(basis):
        return need <= {i for x in basis for i in need if x[i] > 0}

    R = as_matrix(reduced_rows(B.rows, n), n)
    basis = _completion([R.column(j) for j in range(n)], [None] * n, budget, covered)
    total = [0] * n
    missing = set(need)
    for x in basis:
        hit = {i for i in missing if x[i] > 0}
        if hit:
            total = [a + b for a, b in zip(total, x)]
            missing -= hit
    return None if missing else tuple(total)


def _inhomogeneous(cols: list[tuple[int, ...]], c: Sequence[int], budget: int) -> list[Vector]:
    # homogenize with t: sum_j y_j cols[j] - t*c = 0, keep t = 1
    ext = cols + [tuple(-v for v in c)]
    caps: list[Optional[int]] = [None] * len(cols) + [1]
    return [x[:-1] for x in _completion(ext, caps, budget) if x[-1] == 1]


def min_solutions_eq(C, c: Sequence[int], ncols: Optional[int] = None, *,
                     budget: int = DEFAULT_FRONTIER_BUDGET, check: bool = True) -> list[Vector]:
    """min<=({y in N^d : Cy = c}); empty means infeasible."""
    C = as_matrix(C, ncols)
    c = tuple(c)
    if len(c) != C.nrows:
        raise InputError(f"right-hand side has length {len(c)}, matrix has {C.nrows} rows")
    d = C.ncols
    if not any(c):
        return [(0,) * d]
    cols = [C.column(j) for j in range(d)]
    N = _inhomogeneous(cols, c, budget)
    if check and N:
        J = row_basis(C.rows)
        cj = [c[i] for i in J]
        norm_j = max((abs(e) for i in J for e in C.rows[i]), default=0)
        bound = bounds.eval_bound("lemma4", {"c_l1": l1(cj), "d": d, "norm": norm_j, "r": len(J)})
        worst = max(l1(y) for y in N)
        if worst > bound:
            raise BoundViolation(f"minimal solution with |y|_1={worst} > {bound}")
    return N


def _descent(C: IntMatrix, c: Sequence[int], geq_rows: Sequence[bool], max_level: int,
             budget: int) -> list[Vector]:
    """min<= of {z in N^d : row i of Cz - c is 0 (eq rows) or >= 0 (geq rows)}.

    Breadth-first from z = 0, extending along e_j only if <w, Ce_j> < 0
    where w is the residual Cz - c with satisfied inequality rows zeroed.
    For any solution z* >= z this keeps some step below z*, since
    <w, C(z* - z)> <= -|w|^2 < 0.  Minimal solutions have |z|_1 <= max_level.
    """
    d = C.ncols
    cols = [C.column(j) for j in range(d)]
    found: list[Vector] = []
    frontier = {(0,) * d: tuple(-v for v in c)}
    level = 0
    while frontier and level <= max_level:
        sols = []
        nxt: dict[Vector, tuple[int, ...]] = {}
        for z, r in frontier.items():
            w = tuple(min(v, 0) if g else v for v, g in zip(r, geq_rows))
            if not any(w):
                sols.append(z)
        found.extend(sorted(sols))
        sols_set = set(sols)
        for z, r in frontier.items():
            if z in sols_set:
                continue
            w = tuple(min(v, 0) if g else v for v, g in zip(r, geq_rows))
            for j in range(d):
                if dot(w, cols[j]) >= 0:
                    continue
                y = z[:j] + (z[j] + 1,) + z[j + 1:]
                if y in nxt or any(leq(b, y) for b in found):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(r, cols[j]))
            if len(nxt) > budget:
                raise BudgetExceeded(f"solution search frontier exceeded {budget} candidates", budget)
        frontier = nxt
        level += 1
    return sorted(found)


def min_solutions_geq(C, c: Sequence[int], ncols: Optional[int] = None, *,
                      budget: int = DEFAULT_FRONTIER_BUDGET, check: bool = True,
                      method: str = "slack") -> list[Vector]:
    """min<=({z in N^d : Cz >= c}); empty means infeasible.

    method "slack" adds one slack variable per row and goes through the
    homogenized equality engine, which terminates on infeasible systems.
    "descent" searches z directly; it is often faster on feasible systems
    but on an integer-infeasible one it only stops at the level bound.
    Both return the same set.
    """
    C = as_matrix(C, ncols)
    c = tuple(c)
    if len(c) != C.nrows:
        raise InputError(f"right-hand side has length {len(c)}, matrix has {C.nrows} rows")
    d, k = C.ncols, C.nrows
    if all(v <= 0 for v in c):
        return [(0,) * d]
    s = max(C.norm, vnorm(c))
    bound = bounds.eval_bound("lemma5", {"d": d, "s": s, "r": rank(C.rows)})
    if method == "descent":
        Z = _descent(C, c, [True] * k, bound, budget)
    elif method == "slack":
        # Cz - s = c with s in N^k
        cols = [C.column(j) for j in range(d)]
        cols += [tuple(-1 if i == j else 0 for i in range(k)) for j in range(k)]
        Z = minimal_elements(x[:d] for x in _inhomogeneous(cols, c, budget))
    else:
        raise InputError(f"unknown method {method!r}")
    if check and Z:
        worst = max(l1(z) for z in Z)
        if worst > bound:
            raise BoundViolation(f"minimal solution with |z|_1={worst} > {bound}")
    return Z


# ------------------------------------------------------- sign-preserving order

def sign(v: Sequence[int]) -> tuple[int, ...]:
    return tuple((e > 0) - (e < 0) for e in v)


def sleq(u: Sequence[int], v: Sequence[int]) -> bool:
    """u ⪯ v: equal sign vectors and |u(i)| <= |v(i)| everywhere."""
    return sign(u) == sign(v) and all(abs(a) <= abs(b) for a, b in zip(u, v))


def sleq_minimal(vectors: Iterable[Sequence[int]]) -> list[Vector]:
    groups: dict[tuple[int, ...], list[Vector]] = {}
    for v in {tuple(v) for v in vectors}:
        groups.setdefault(sign(v), []).append(v)
    out = []
    for vs in groups.values():
        absd = {v: tuple(abs(e) for e in v) for v in vs}
        vs.sort(key=lambda v: sum(absd[v]))
        kept: list[Vector] = []
        for v in vs:
            if not any(leq(absd[u], absd[v]) for u in kept):
                kept.append(v)
        out.extend(kept)
    return sorted(out)


def min_sleq_monoid(gens: Iterable[Sequence[int]], dim: Optional[int] = None, *,
                    budget: int = DEFAULT_FRONTIER_BUDGET, check: bool = True) -> list[Vector]:
    """min⪯ of the monoid generated by gens, always containing zero.

    For each sign vector s the solutions of D_s x' = C x'' are generated by
    the Hilbert basis of [D_{-s} | C]; a ⪯-minimal y of sign s is C x̄''
    for a sum x̄ of at most |supp s| basis elements, one covering each
    nonzero coordinate.
    """
    gens = canonical(gens)
    if dim is None:
        if not gens:
            raise InputError("dimension of an empty generator set must be given")
        dim = len(gens[0])
    if any(len(g) != dim for g in gens):
        raise InputError("generator lengths differ")
    d = dim
    zero = (0,) * d
    gens = [g for g in gens if g != zero]
    k = len(gens)
    candidates = {zero}
    if k:
        for s in product((-1, 0, 1), repeat=d):
            supp = [i for i in range(d) if s[i]]
            if not supp:
                continue
            rows = [[-s[i] if j == i else 0 for j in range(d)] + [g[i] for g in gens]
                    for i in range(d)]
            X = hilbert_basis(rows, budget=budget, check=check)
            useful = [x for x in X if any(x[i] > 0 for i in supp)]
            for size in range(1, len(supp) + 1):
                for combo in combinations(useful, size):
                    xs = [sum(x[i] for x in combo) for i in range(d)]
                    if any(xs[i] == 0 for i in supp):
                        continue
                    candidates.add(tuple(s[i] * xs[i] for i in range(d)))
    result = sleq_minimal(candidates)
    if check:
        bound = bounds.eval_bound("lemma3", {"d": d, "norm": max(map(vnorm, gens), default=0)})
        worst = max(vnorm(y) for y in result)
        if worst > bound:
            raise BoundViolation(f"min⪯ element with norm {worst} > {bound}")
    return result


def sleq_decompose(gens: Iterable[Sequence[int]], y: Sequence[int],
                   dim: Optional[int] = None, *, minimal: Optional[list[Vector]] = None):
    """Split y = z + (y - z) with z ∈ min⪯(L), z ⪯ y and y - z ∈ L.

    L is the group spanned by gens.  ``minimal`` may carry a precomputed
    min⪯(L) to avoid recomputation across repeated calls.
    """
    from .lattice import Lattice, lattice_member

    gens = canonical(gens)
    y = tuple(y)
    d = dim if dim is not None else len(y)
    if not lattice_member(Lattice(d, gens), y):
        raise MembershipError(f"{y} is not in the group spanned by the generators")
    if minimal is None:
        minimal = min_sleq_monoid(gens + [tuple(-e for e in g) for g in gens], d)
    z = next(m for m in minimal if sleq(m, y))
    return z, tuple(a - b for a, b in zip(y, z))


def sleq_segments(gens: Iterable[Sequence[int]], y: Sequence[int],
                  dim: Optional[int] = None) -> list[Vector]:
    """Repeatedly decompose y into ⪯-directed steps z_1, ..., z_k summing to y."""
    gens = canonical(gens)
    d = dim if dim is not None else len(y)
    minimal = min_sleq_monoid(gens + [tuple(-e for e in g) for g in gens], d)
    steps, rest = [], tuple(y)
    while any(rest):
        z, rest = sleq_decompose(gens, rest, d, minimal=minimal)
        steps.append(z)
    return steps


# -------------------------------------------------------------- text formats

def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


def parse_matrix(text: str) -> IntMatrix:
    lines = list(_lines(text))
    if not lines:
        raise InputError("empty matrix file; expected 'm n' header")
    lineno, head = lines[0]
    hdr = _parse_ints(head, lineno)
    if len(hdr) != 2 or min(hdr) < 0:
        raise InputError(f"line {lineno}: expected header 'm n'")
    m, n = hdr
    rows = []
    for lineno, tok in lines[1:]:
        r = _parse_ints(tok, lineno)
        if len(r) != n:
            raise InputError(f"line {lineno}: row has {len(r)} entries, expected {n}")
        rows.append(tuple(r))
    if len(rows) != m:
        raise InputError(f"matrix declares {m} rows but has {len(rows)}")
    return IntMatrix(tuple(rows), n)


def serialize_matrix(B: IntMatrix) -> str:
    lines = [f"{B.nrows} {B.ncols}"] + [" ".join(map(str, r)) for r in B.rows]
    return "\n".join(lines) + "\n"


def parse_vector_set(text: str) -> tuple[int, list[Vector]]:
    """One vector per line; an optional leading 'dim n' line fixes the dimension."""
    dim: Optional[int] = None
    vecs: list[Vector] = []
    for lineno, tok in _lines(text):
        if tok[0] == "dim":
            if vecs or len(tok) != 2:
                raise InputError(f"line {lineno}: 'dim n' must come first")
            dim = _parse_ints(tok[1:], lineno)[0]
            continue
        v = tuple(_parse_ints(tok, lineno))
        if dim is None:
            dim = len(v)
        if len(v) != dim:
            raise InputError(f"line {lineno}: vector has {len(v)} entries, expected {dim}")
        vecs.append(v)
    if dim is None:
        raise InputError("empty vector set needs a 'dim n' line")
    return dim, canonical(vecs)


def serialize_vector_set(dim: int, vecs: Iterable[Sequence[int]]) -> str:
    lines = [f"dim {dim}"] + [" ".join(map(str, v)) for v in canonical(vecs)]
    return "\n".join(lines) + "\n"
