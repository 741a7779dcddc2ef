"""Integer lattices: Hermite normal form, membership, and the encoding of a
finitely generated subgroup of Z^d as a linear system with divisibility
constraints.

Lattice vectors are columns: L = {Cz : z in Z^k} for the d x k generator
matrix C.  The Hermite form H satisfies L_H = L_C and x is in L iff H^-1 x
is integral; because ℓ = det(H) annihilates Z^d / L, membership depends on
x only modulo ℓ, which is what the encoding exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import BudgetExceeded, InputError, StructuralError
from .hilbert import canonical, min_solutions_eq
from .intlinalg import det, row_basis, transpose
from .linsys import (TRUE, Atom, Constraint, LinearSystem, Or, conj, mod,
                     substitute)
from .net import Net, Vector, vnorm, vsub

DEFAULT_RESIDUE_BUDGET = 10 ** 6


@dataclass(frozen=True)
class Lattice:
    dim: int
    generators: tuple[Vector, ...]
    _hnf: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.generators)
        for g in gens:
            if len(g) != self.dim:
                raise InputError(f"generator {g} does not have length {self.dim}")
        object.__setattr__(self, "generators", gens)

    @property
    def norm(self) -> int:
        return max((vnorm(g) for g in self.generators), default=0)

    def hnf(self) -> "HnfResult":
        if not self._hnf:
            self._hnf.append(hnf([list(col) for col in transpose(self.generators, self.dim)]
                                 if self.generators else [[] for _ in range(self.dim)]))
        return self._hnf[0]


@dataclass(frozen=True)
class HnfResult:
    """Hermite data for the lattice spanned by the columns of a d x k matrix.

    basis_rows lists the greedy row basis J (size r = rank).  H is the
    canonical r x r Hermite form of the columns restricted to J.  Every
    lattice vector satisfies denominator * x_i = sum_j T[i][j] * x_{J[j]}
    for each dependent row i; T holds Cramer numerators.
    """

    dim: int
    rank: int
    basis_rows: tuple[int, ...]
    H: tuple[tuple[int, ...], ...]
    det: int
    dependent_rows: tuple[int, ...] = ()
    T: tuple[tuple[int, ...], ...] = ()
    denominator: int = 1

    @property
    def permutation(self) -> tuple[int, ...]:
        return self.basis_rows + self.dependent_rows

    @property
    def needs_reduction(self) -> bool:
        """True when some Cramer row shares a factor with the denominator."""
        from math import gcd
        return any(gcd(self.denominator, *row) > 1 for row in self.T)


def _col_combine(A, i, j, row):
    """Column ops on columns i, j so A[row][i] = gcd and A[row][j] = 0."""
    a, b = A[row][i], A[row][j]
    # extended gcd: g = s*a + t*b
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    g, s, t = old_r, old_s, old_t
    u, v = b // g, a // g
    for R in A:
        x, y = R[i], R[j]
        R[i] = s * x + t * y
        R[j] = -u * x + v * y


def _hnf_full_row_rank(A: list[list[int]]) -> list[list[int]]:
    """Canonical lower-triangular Hermite form of a full-row-rank r x k matrix."""
    r = len(A)
    k = len(A[0]) if r else 0
    A = [list(row) for row in A]
    for i in range(r):
        if A[i][i] == 0:
            j = next(j for j in range(i, k) if A[i][j])
            for R in A:
                R[i], R[j] = R[j], R[i]
        for j in range(i + 1, k):
            if A[i][j]:
                _col_combine(A, i, j, i)
        if A[i][i] < 0:
            for R in A:
                R[i] = -R[i]
    for i in range(r):
        p = A[i][i]
        for j in range(i):
            q = A[i][j] // p
            if q:
                for R in A:
                    R[j] -= q * R[i]
    return [row[:r] for row in A]


def hnf(C: Sequence[Sequence[int]]) -> HnfResult:
    """Hermite data for the column lattice of the d x k matrix C (list of rows)."""
    d = len(C)
    rows = [list(r) for r in C]
    J = row_basis(rows)
    r = len(J)
    if r == 0:
        return HnfResult(d, 0, (), (), 1, tuple(range(d)), tuple(() for _ in range(d)), 1)
    sub = [rows[i] for i in J]
    H = _hnf_full_row_rank(sub)
    detH = 1
    for i in range(r):
        detH *= H[i][i]
    dependent = tuple(i for i in range(d) if i not in J)
    T: list[tuple[int, ...]] = []
    denom = 1
    if dependent:
        # r independent columns of the basis rows give an invertible M
        cols = row_basis(transpose(sub, len(sub[0])))
        M = [[rows[i][c] for c in cols] for i in J]
        denom = det(M)
        sgn = -1 if denom < 0 else 1
        denom *= sgn
        for i in dependent:
            m_i = [rows[i][c] for c in cols]
            T.append(tuple(sgn * det([m_i if jj == j else M[jj] for jj in range(r)])
                           for j in range(r)))
    return HnfResult(d, r, tuple(J), tuple(tuple(h) for h in H), detH,
                     dependent, tuple(T), denom)


def _hnf_integral(H, x) -> bool:
    """Forward substitution: is H^-1 x an integer vector?"""
    z = []
    for i, row in enumerate(H):
        s = x[i] - sum(row[j] * z[j] for j in range(i))
        if s % row[i]:
            return False
        z.append(s // row[i])
    return True


def lattice_member(L: Lattice, x: Sequence[int], *, residue: bool = False) -> bool:
    """x in L.  With residue=True the test runs on x reduced mod det(H)."""
    if len(x) != L.dim:
        raise InputError(f"point has length {len(x)}, lattice dimension is {L.dim}")
    h = L.hnf()
    for i, row in zip(h.dependent_rows, h.T):
        if h.denominator * x[i] != sum(t * x[j] for t, j in zip(row, h.basis_rows)):
            return False
    xj = [x[j] for j in h.basis_rows]
    if residue:
        xj = [v % h.det for v in xj]
    return _hnf_integral(h.H, xj)


def residue_set(h: HnfResult, budget: int = DEFAULT_RESIDUE_BUDGET) -> list[Vector]:
    """All b in [0,ℓ)^r with H^-1 b integral, in lexicographic order."""
    r, l = h.rank, h.det
    size = l ** (r - 1) if r else 1
    if size > budget:
        raise BudgetExceeded(f"residue enumeration needs {l}^{r}/{l} = {size} classes, "
                             f"budget is {budget}", budget)
    H = h.H
    out: list[Vector] = []

    def go(i, b, z):
        if i == r:
            out.append(tuple(b))
            return
        s = sum(H[i][j] * z[j] for j in range(i))
        p = H[i][i]
        # b_i = s + p*z_i must lie in [0, l)
        zi = -(s // p)
        while True:
            bi = s + p * zi
            if bi >= l:
                break
            if bi >= 0:
                go(i + 1, b + [bi], z + [zi])
            zi += 1

    go(0, [], [])
    return out


def group_to_linsys(L: Lattice, *, budget: int = DEFAULT_RESIDUE_BUDGET) -> LinearSystem:
    """A linear system whose solution set is exactly L."""
    d = L.dim
    h = L.hnf()
    parts = []
    for i, row in zip(h.dependent_rows, h.T):
        coeffs = [0] * d
        coeffs[i] = h.denominator
        for t, j in zip(row, h.basis_rows):
            coeffs[j] -= t
        parts.append(Atom(Constraint("eq", tuple(coeffs), 0)))
    l = h.det
    # ℓ = 1 means the projection is all of Z^r; mod-1 atoms would carry no information
    if h.rank and l > 1:
        branches = []
        for b in residue_set(h, budget):
            atoms = []
            for j, bj in zip(h.basis_rows, b):
                e = [0] * d
                e[j] = 1
                atoms.append(mod(e, bj, l))
            branches.append(conj(atoms))
        parts.append(Or(tuple(branches)) if len(branches) > 1 else branches[0])
    if not parts:
        return LinearSystem(d, TRUE)
    return LinearSystem(d, conj(parts))


def virtual_reach_system(net: Net, **kw) -> LinearSystem:
    """System over (x, y) in Z^2d satisfied iff y - x is in the displacement group."""
    from .structural import reversibility_witness
    if reversibility_witness(net) is None:
        raise StructuralError(f"net {net.name} is not reversible")
    d = net.dim
    S = group_to_linsys(Lattice(d, tuple(canonical(net.deltas()))), **kw)
    rows = []
    for i in range(d):
        row = [0] * (2 * d)
        row[i] = -1
        row[d + i] = 1
        rows.append(row)
    return substitute(S, rows, 2 * d)


def virtual_reach(net: Net, x: Sequence[int], y: Sequence[int], *,
                  budget: int = 10 ** 6) -> Optional[bool]:
    """x ⇝* y: y - x is a sum of action displacements.

    Reversible nets use group membership.  Otherwise the monoid question is
    decided exactly through the minimal nonnegative solutions of the
    displacement equation; None means the search budget ran out.
    """
    from .structural import reversibility_witness
    if len(x) != net.dim or len(y) != net.dim:
        raise InputError(f"markings must have length {net.dim}")
    diff = vsub(y, x)
    deltas = net.deltas()
    if not deltas:
        return not any(diff)
    if reversibility_witness(net) is not None:
        return lattice_member(Lattice(net.dim, tuple(deltas)), diff)
    try:
        return bool(min_solutions_eq(transpose(deltas, net.dim), diff, len(deltas),
                                     budget=budget, check=False))
    except BudgetExceeded:
        return None
