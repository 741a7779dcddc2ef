"""Linear systems: boolean combinations of equality, inequality and
divisibility constraints over Z^d, with an exact minimal-solution solver.

Solving follows the residue reduction: with l the lcm of all moduli, every
x is b + l*y for a unique residue vector b in [0,l)^d, and substituting
turns each divisibility atom into a constant.  What remains is a
divisibility-free system in y, solved disjunct by disjunct.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Iterator, Optional, Sequence, Union

from . import bounds
from .errors import BudgetExceeded, InputError
from .hilbert import min_solutions_geq
from .intlinalg import dot, fm_feasible, integer_solvable
from .net import Vector, l1, vnorm

KINDS = ("eq", "geq", "mod")
DEFAULT_RESIDUE_BUDGET = 10 ** 7


@dataclass(frozen=True)
class Constraint:
    kind: str
    coeffs: Vector
    rhs: int
    modulus: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.kind not in KINDS:
            raise InputError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "mod":
            m = self.modulus
            if m is None or m < 1:
                raise InputError("modulus must be a positive integer")
            if not all(0 <= a < m for a in self.coeffs) or not 0 <= self.rhs < m:
                raise InputError(f"mod {m} constraint needs coefficients and rhs in [0,{m - 1}]")
        elif self.modulus is not None:
            raise InputError(f"{self.kind} constraint takes no modulus")

    def holds(self, x: Sequence[int]) -> bool:
        v = dot(self.coeffs, x)
        if self.kind == "eq":
            return v == self.rhs
        if self.kind == "geq":
            return v >= self.rhs
        return (v - self.rhs) % self.modulus == 0


def eq(coeffs, c) -> "Atom":
    return Atom(Constraint("eq", tuple(coeffs), c))


def geq(coeffs, c) -> "Atom":
    return Atom(Constraint("geq", tuple(coeffs), c))


def mod(coeffs, c, m) -> "Atom":
    """Divisibility atom with coefficients and rhs reduced into [0, m)."""
    return Atom(Constraint("mod", tuple(a % m for a in coeffs), c % m, m))


@dataclass(frozen=True)
class Atom:
    constraint: Constraint


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)
Formula = Union[Atom, And, Or, Not, Const]


@dataclass(frozen=True)
class LinearSystem:
    dim: int
    formula: Formula

    def __post_init__(self):
        for c in atoms(self.formula):
            if len(c.coeffs) != self.dim:
                raise InputError(
                    f"atom has {len(c.coeffs)} coefficients, system dimension is {self.dim}")


def atoms(f: Formula) -> Iterator[Constraint]:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            yield g.constraint
        elif isinstance(g, (And, Or)):
            stack.extend(g.children)
        elif isinstance(g, Not):
            stack.append(g.child)


def conj(parts) -> Formula:
    parts = list(parts)
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(parts) -> Formula:
    parts = list(parts)
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


# ----------------------------------------------------------------- evaluation

def _residue_index(node: Or):
    """Recognize a disjunction of 'x_i = b_i (mod l)' conjunctions.

    Such disjunctions come out of lattice encodings with thousands of
    branches; a set lookup replaces the linear scan.  Returns None when the
    shape does not match.
    """
    cached = node.__dict__.get("_rindex", False)
    if cached is not False:
        return cached
    index = None
    coords = None
    modulus = None
    keys = set()
    for ch in node.children:
        parts = ch.children if isinstance(ch, And) else (ch,)
        row = {}
        for p in parts:
            if not isinstance(p, Atom) or p.constraint.kind != "mod":
                break
            c = p.constraint
            nz = [i for i, a in enumerate(c.coeffs) if a]
            if len(nz) != 1 or c.coeffs[nz[0]] != 1 or nz[0] in row:
                break
            if modulus is None:
                modulus = c.modulus
            if c.modulus != modulus:
                break
            row[nz[0]] = c.rhs
        else:
            key_coords = tuple(sorted(row))
            if coords is None:
                coords = key_coords
            if key_coords == coords:
                keys.add(tuple(row[i] for i in coords))
                continue
        break
    else:
        if coords is not None and len(node.children) > 8:
            index = (modulus, coords, frozenset(keys))
    object.__setattr__(node, "_rindex", index)
    return index


def _eval(f: Formula, x: Sequence[int]) -> bool:
    if isinstance(f, Atom):
        return f.constraint.holds(x)
    if isinstance(f, And):
        return all(_eval(g, x) for g in f.children)
    if isinstance(f, Or):
        idx = _residue_index(f)
        if idx is not None:
            m, coords, keys = idx
            return tuple(x[i] % m for i in coords) in keys
        return any(_eval(g, x) for g in f.children)
    if isinstance(f, Not):
        return not _eval(f.child, x)
    return f.value


def evaluate(S: LinearSystem, x: Sequence[int]) -> bool:
    if len(x) != S.dim:
        raise InputError(f"point has length {len(x)}, system dimension is {S.dim}")
    return _eval(S.formula, tuple(x))


def system_norms(S: LinearSystem) -> tuple[int, int]:
    """(‖S‖, mlcm(S)): max over eq/geq atoms of max{‖α‖,|c|}, and lcm of moduli."""
    norm, l = 0, 1
    for c in atoms(S.formula):
        if c.kind == "mod":
            l = l * c.modulus // gcd(l, c.modulus)
        else:
            norm = max(norm, vnorm(c.coeffs), abs(c.rhs))
    return norm, l


# -------------------------------------------------------------- normalization

def simplify(f: Formula) -> Formula:
    """Constant folding; flattens nested and/or."""
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        g = simplify(f.child)
        if isinstance(g, Const):
            return Const(not g.value)
        return Not(g)
    is_and = isinstance(f, And)
    unit, zero = (TRUE, FALSE) if is_and else (FALSE, TRUE)
    kids = []
    for ch in f.children:
        g = simplify(ch)
        if g == zero:
            return zero
        if g == unit:
            continue
        if type(g) is type(f):
            kids.extend(g.children)
        else:
            kids.append(g)
    if not kids:
        return unit
    if len(kids) == 1:
        return kids[0]
    return And(tuple(kids)) if is_and else Or(tuple(kids))


def _neg_atom(c: Constraint) -> Formula:
    if c.kind == "geq":
        return geq([-a for a in c.coeffs], -c.rhs + 1)
    if c.kind == "eq":
        return Or((geq(c.coeffs, c.rhs + 1), geq([-a for a in c.coeffs], -c.rhs + 1)))
    return disj([mod(c.coeffs, r, c.modulus) for r in range(c.modulus) if r != c.rhs]) \
        if c.modulus > 1 else FALSE


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations into atoms, which then become positive atoms again."""
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Atom):
        return _neg_atom(f.constraint) if negate else f
    if isinstance(f, Not):
        return nnf(f.child, not negate)
    kids = tuple(nnf(g, negate) for g in f.children)
    if isinstance(f, And) != negate:
        return And(kids)
    return Or(kids)


def to_dnf(f: Formula, split_eq: bool = True) -> list[list[Constraint]]:
    """Disjuncts of constraint conjunctions, negation-free.

    With split_eq every equality becomes the pair of inequalities
    <α,x> >= c and <-α,x> >= -c.
    """
    g = simplify(nnf(f))

    def go(h) -> list[list[Constraint]]:
        if isinstance(h, Const):
            return [[]] if h.value else []
        if isinstance(h, Atom):
            c = h.constraint
            if split_eq and c.kind == "eq":
                return [[Constraint("geq", c.coeffs, c.rhs),
                         Constraint("geq", tuple(-a for a in c.coeffs), -c.rhs)]]
            return [[c]]
        if isinstance(h, Or):
            return [d for ch in h.children for d in go(ch)]
        out: list[list[Constraint]] = [[]]
        for ch in h.children:
            sub = go(ch)
            out = [a + b for a in out for b in sub]
            if not out:
                break
        return out

    return go(g)


def dnf_system(S: LinearSystem, split_eq: bool = True) -> LinearSystem:
    disjuncts = to_dnf(S.formula, split_eq)
    return LinearSystem(S.dim, disj([conj([Atom(c) for c in d]) if d else TRUE
                                     for d in disjuncts]) if disjuncts else FALSE)


def substitute(S: LinearSystem, rows: Sequence[Sequence[int]], new_dim: int) -> LinearSystem:
    """Replace variable x_i by the linear form rows[i] over new_dim variables."""
    if len(rows) != S.dim or any(len(r) != new_dim for r in rows):
        raise InputError("substitution must give one length-new_dim row per variable")

    def coeffs(alpha):
        return [sum(alpha[i] * rows[i][j] for i in range(S.dim)) for j in range(new_dim)]

    def go(f):
        if isinstance(f, Atom):
            c = f.constraint
            if c.kind == "mod":
                return mod(coeffs(c.coeffs), c.rhs, c.modulus)
            return Atom(Constraint(c.kind, tuple(coeffs(c.coeffs)), c.rhs))
        if isinstance(f, And):
            return And(tuple(go(g) for g in f.children))
        if isinstance(f, Or):
            return Or(tuple(go(g) for g in f.children))
        if isinstance(f, Not):
            return Not(go(f.child))
        return f

    return LinearSystem(new_dim, go(S.formula))


def residue_reduce(S: LinearSystem, b: Sequence[int]) -> LinearSystem:
    """The system S_b over y with [[S_b]] = {y : b + l*y in [[S]]}."""
    _, l = system_norms(S)
    b = tuple(b)
    if len(b) != S.dim or not all(0 <= v < l for v in b):
        raise InputError(f"residue vector must lie in [0,{l})^{S.dim}")

    def go(f):
        if isinstance(f, Atom):
            c = f.constraint
            shift = c.rhs - dot(c.coeffs, b)
            if c.kind == "eq":
                if shift % l:
                    return FALSE
                return Atom(Constraint("eq", c.coeffs, shift // l))
            if c.kind == "geq":
                return Atom(Constraint("geq", c.coeffs, -(-shift // l)))
            return Const((dot(c.coeffs, b) - c.rhs) % c.modulus == 0)
        if isinstance(f, And):
            return And(tuple(go(g) for g in f.children))
        if isinstance(f, Or):
            return Or(tuple(go(g) for g in f.children))
        if isinstance(f, Not):
            return Not(go(f.child))
        return f

    return LinearSystem(S.dim, go(S.formula))


# ---------------------------------------------------------------------- solver

def _shells(d: int, n: int) -> Iterator[Vector]:
    """All z in N^d with |z|_1 = n, lexicographically descending."""
    if d == 0:
        if n == 0:
            yield ()
        return
    if d == 1:
        yield (n,)
        return
    for v in range(n, -1, -1):
        for rest in _shells(d - 1, n - v):
            yield (v,) + rest


def _min_shell(rows, rhs, d, lo, hi) -> tuple[Optional[int], list[Vector]]:
    """Least n in [lo, hi] with a z, |z|_1 = n, satisfying all rows; all such z."""
    for n in range(lo, hi + 1):
        sols = [z for z in _shells(d, n)
                if all(dot(r, z) >= c for r, c in zip(rows, rhs))]
        if sols:
            return n, sols
    return None, []


def solve_min(S: LinearSystem, *, probe: int = 6,
              residue_budget: int = DEFAULT_RESIDUE_BUDGET,
              budget: int = 10 ** 6) -> Optional[Vector]:
    """A solution of least |x|_1 (ties broken lexicographically), or None.

    For each residue b and each disjunct of S_b (equalities split into two
    inequalities) the search runs per sign orthant of y: y_i = z_i or
    y_i = -1 - z_i with z in N^d.  Then |x|_1 = base + l*|z|_1 with base
    fixed by (b, orthant), so orthants are visited by increasing base.  Once
    some solution of norm N is known every remaining orthant needs only
    |z|_1 <= (N - base)/l, a finite enumeration.  Before that, an orthant is
    probed up to |z|_1 <= probe and otherwise decided exactly by the
    minimal-solution engine for inequality systems, so the search is
    complete without enumerating up to the small-solution bound.  Branches
    whose equalities have no integer solution, or whose inequalities have no
    rational one, are dropped before any search.
    """
    d = S.dim
    norm, l = system_norms(S)
    if l ** d > residue_budget:
        raise BudgetExceeded(f"{l}^{d} residue classes exceed the budget {residue_budget}",
                             residue_budget)
    tasks = []
    for b in product(range(l), repeat=d):
        Sb = simplify(residue_reduce(S, b).formula)
        if Sb == FALSE:
            continue
        for disjunct in to_dnf(Sb, split_eq=False):
            eqs = [c for c in disjunct if c.kind == "eq"]
            if eqs and not integer_solvable([c.coeffs for c in eqs], [c.rhs for c in eqs]):
                continue
            # a >= c and -a >= -c for each equality
            ineqs = [(c.coeffs, c.rhs) for c in disjunct]
            ineqs += [(tuple(-a for a in c.coeffs), -c.rhs) for c in eqs]
            for orth in product((1, -1), repeat=d):
                base = sum(bi if o > 0 else l - bi for bi, o in zip(b, orth))
                rows = [tuple(a * o for a, o in zip(co, orth)) for co, _ in ineqs]
                rhs = [c + sum(a for a, o in zip(co, orth) if o < 0) for co, c in ineqs]
                if rows and not fm_feasible(rows, rhs):
                    continue
                tasks.append((base, b, orth, rows, rhs))
    tasks.sort(key=lambda t: t[0])
    best: Optional[int] = None
    best_points: set[Vector] = set()
    lemma6 = bounds.eval_bound("lemma6", {"d": d, "norm": d * norm + 1})
    for base, b, orth, rows, rhs in tasks:
        if best is not None and base > best:
            break
        if best is None:
            n, zs = _min_shell(rows, rhs, d, 0, probe)
            if n is None:
                try:
                    mins = min_solutions_geq(rows, rhs, d, budget=budget) if rows else [(0,) * d]
                except BudgetExceeded as e:
                    raise BudgetExceeded(
                        f"{e}; the small-solution bound for this branch is {lemma6}",
                        e.budget) from None
                if not mins:
                    continue
                n = min(l1(z) for z in mins)
                zs = [z for z in mins if l1(z) == n]
        else:
            n, zs = _min_shell(rows, rhs, d, 0, (best - base) // l)
            if n is None:
                continue
        value = base + l * n
        pts = {tuple(bi + l * (zi if o > 0 else -1 - zi) for bi, zi, o in zip(b, z, orth))
               for z in zs}
        if best is None or value < best:
            best, best_points = value, pts
        elif value == best:
            best_points |= pts
    return min(best_points) if best_points else None


def check_theorem2_bound(S: LinearSystem, **kw) -> dict:
    d = S.dim
    norm, l = system_norms(S)
    bound = bounds.eval_bound("theorem2", {"mlcm": l, "d": d, "norm": norm})
    x = solve_min(S, **kw)
    if x is None:
        return {"status": "vacuous", "bound": bound, "solution": None, "min_norm": None}
    n = l1(x)
    if n > bound:
        raise AssertionError(f"minimal solution norm {n} exceeds the bound {bound}")
    return {"status": "ok", "bound": bound, "solution": x, "min_norm": n}


# ---------------------------------------------------------------- s-expressions

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split(";", 1)[0]
        out.extend((m.group(0), lineno) for m in _TOKEN.finditer(line))
    return out


def _read(tokens, pos):
    tok, lineno = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise InputError(f"line {lineno}: unbalanced '('")
            if tokens[pos][0] == ")":
                return (items, lineno), pos + 1
            item, pos = _read(tokens, pos)
            items.append(item)
    if tok == ")":
        raise InputError(f"line {lineno}: unexpected ')'")
    return (tok, lineno), pos + 1


def _int(node) -> int:
    tok, lineno = node
    if isinstance(tok, list) or not re.fullmatch(r"[+-]?\d+", tok):
        raise InputError(f"line {lineno}: expected an integer, got {_show(tok)}")
    return int(tok)


def _show(tok):
    return "a list" if isinstance(tok, list) else repr(tok)


def _to_formula(node) -> Formula:
    tok, lineno = node
    if not isinstance(tok, list):
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        raise InputError(f"line {lineno}: unknown token {tok!r}")
    if not tok or isinstance(tok[0][0], list):
        raise InputError(f"line {lineno}: expected an operator")
    op, args = tok[0][0], tok[1:]
    if op in ("and", "or"):
        kids = tuple(_to_formula(a) for a in args)
        return And(kids) if op == "and" else Or(kids)
    if op == "not":
        if len(args) != 1:
            raise InputError(f"line {lineno}: 'not' takes one argument")
        return Not(_to_formula(args[0]))
    if op in ("eq", "geq", "mod"):
        want = 3 if op == "mod" else 2
        if len(args) != want or not isinstance(args[0][0], list):
            raise InputError(f"line {lineno}: malformed {op} atom")
        coeffs = tuple(_int(a) for a in args[0][0])
        rhs = _int(args[1])
        if op == "mod":
            return Atom(Constraint("mod", coeffs, rhs, _int(args[2])))
        return Atom(Constraint(op, coeffs, rhs))
    raise InputError(f"line {lineno}: unknown operator {op!r}")


def parse_system(text: str) -> LinearSystem:
    """Parse one system; an optional (system d formula) wrapper fixes d."""
    tokens = _tokenize(text)
    if not tokens:
        raise InputError("empty system file")
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise InputError(f"line {tokens[pos][1]}: trailing input after the system")
    tok, lineno = node
    dim = None
    if isinstance(tok, list) and tok and tok[0][0] == "system":
        if len(tok) != 3:
            raise InputError(f"line {lineno}: expected (system d formula)")
        dim = _int(tok[1])
        node = tok[2]
    f = _to_formula(node)
    if dim is None:
        first = next(atoms(f), None)
        dim = len(first.coeffs) if first is not None else 0
    return LinearSystem(dim, f)


def _fmt(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        c = f.constraint
        body = f"({c.kind} ({' '.join(map(str, c.coeffs))}) {c.rhs}"
        return body + (f" {c.modulus})" if c.kind == "mod" else ")")
    if isinstance(f, Not):
        return f"(not {_fmt(f.child)})"
    op = "and" if isinstance(f, And) else "or"
    return "(" + " ".join([op] + [_fmt(g) for g in f.children]) + ")"


def serialize_system(S: LinearSystem) -> str:
    return f"(system {S.dim} {_fmt(S.formula)})\n"
