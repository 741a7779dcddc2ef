"""Petri nets with states.

A bottom SCC X of a net and a set I of "small" components give a control
graph: states are the restrictions x|I for x in X, edges are the steps of
the net restricted to I that stay inside the state set.  The remaining
components J act as counters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetExceeded, InputError, StructuralError
from .hilbert import canonical, hilbert_basis, min_sleq_monoid
from .lattice import Lattice, group_to_linsys, lattice_member
from .linsys import LinearSystem, conj, eq, geq, substitute
from .net import (Action, Marking, Net, Vector, leq, net_norm, parse_net,
                  restrict_net, serialize_net, vnorm, vsub)
from .reach import BottomSCC, bottom_sccs, reachability_graph

DEFAULT_CYCLE_BUDGET = 10 ** 5
MAX_SBAR_COUNTERS = 4


def _project(x: Sequence[int], idx: Sequence[int]) -> Vector:
    return tuple(x[i] for i in idx)


@dataclass(frozen=True)
class Pns:
    base: Net
    I: tuple[int, ...]
    states: tuple[Vector, ...]
    edges: tuple[tuple[int, int, int], ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def J(self) -> tuple[int, ...]:
        inside = set(self.I)
        return tuple(i for i in range(self.base.dim) if i not in inside)

    @property
    def norm(self) -> int:
        return max(max((vnorm(q) for q in self.states), default=0), net_norm(self.base))

    def state_index(self, p: Sequence[int]) -> int:
        try:
            return self.states.index(tuple(p))
        except ValueError:
            raise InputError(f"{tuple(p)} is not a state of the PNS") from None

    def edge_displacement(self, e: tuple[int, int, int]) -> Vector:
        """Counter displacement (restricted to J) of an edge."""
        return _project(self.base.actions[e[1]].delta, self.J)

    def out_edges(self) -> list[list[tuple[int, int, int]]]:
        if "out" not in self._cache:
            out: list[list] = [[] for _ in self.states]
            for e in self.edges:
                out[e[0]].append(e)
            self._cache["out"] = out
        return self._cache["out"]

    @property
    def reversible(self) -> bool:
        """A closed walk through every edge with zero counter displacement exists."""
        if "rev" not in self._cache:
            self._cache["rev"] = _zero_circulation(self) is not None
        return self._cache["rev"]


@dataclass(frozen=True)
class PnsConf:
    state: Vector
    counters: Vector


def _zero_circulation(G: Pns) -> Optional[Vector]:
    """Edge multiplicities >= 1 forming a circulation with zero displacement.

    In a strongly connected graph such multiplicities are exactly the edge
    counts of a closed walk using every edge (Euler), so this decides the
    zero-displacement covering cycle.
    """
    m = len(G.edges)
    if m == 0:
        return ()
    if not _strongly_connected(len(G.states), G.edges):
        return None
    rows = []
    for s in range(len(G.states)):
        rows.append([(e[2] == s) - (e[0] == s) for e in G.edges])
    for k in range(len(G.J)):
        rows.append([G.edge_displacement(e)[k] for e in G.edges])
    basis = hilbert_basis(rows, m, check=False)
    total = [0] * m
    for b in basis:
        if any(b[i] > 0 and total[i] == 0 for i in range(m)):
            total = [u + v for u, v in zip(total, b)]
    return tuple(total) if all(total) else None


def _strongly_connected(n: int, edges: Iterable[tuple[int, int, int]]) -> bool:
    if n == 0:
        return True
    fwd: list[list[int]] = [[] for _ in range(n)]
    bwd: list[list[int]] = [[] for _ in range(n)]
    for p, _, q in edges:
        fwd[p].append(q)
        bwd[q].append(p)

    def reach(adj):
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n

    return reach(fwd) and reach(bwd)


def _check_bottom_scc(net: Net, X: Sequence[Marking], node_budget: int) -> None:
    if not X:
        raise StructuralError("empty marking set is not a bottom SCC")
    g = reachability_graph(net, X[0], node_budget)
    if set(g.nodes) != set(X):
        raise StructuralError("marking set is not closed or not strongly connected "
                              "under the net's steps, so it is not a bottom SCC")
    if len(bottom_sccs(g)) != 1 or len(bottom_sccs(g)[0].markings) != len(X):
        raise StructuralError("marking set is not strongly connected, so it is not a bottom SCC")


def _markings(X) -> tuple[Marking, ...]:
    if isinstance(X, BottomSCC):
        return tuple(X.markings)
    return tuple(sorted(tuple(x) for x in X))


def build_pns(net: Net, X, I: Iterable[int], *, node_budget: int = 10 ** 6) -> Pns:
    """The PNS for the bottom SCC X and 0-based component set I."""
    X = _markings(X)
    I = tuple(sorted(set(I)))
    if any(not 0 <= i < net.dim for i in I):
        raise InputError(f"component set must lie in [1,{net.dim}]")
    _check_bottom_scc(net, X, node_budget)
    states = tuple(sorted({_project(x, I) for x in X}))
    index = {q: k for k, q in enumerate(states)}
    edges = set()
    for k, p in enumerate(states):
        for a, act in enumerate(net.actions):
            c = _project(act.consume, I)
            if leq(c, p):
                q = tuple(v - u + w for v, u, w in zip(p, c, _project(act.produce, I)))
                if q in index:
                    edges.add((k, a, index[q]))
    G = Pns(net, I, states, tuple(sorted(edges)))
    if not _strongly_connected(len(states), G.edges):
        raise StructuralError("control graph is not strongly connected")
    return G


def restrict_pns(G: Pns, Jprime: Iterable[int]) -> Pns:
    """G with only the counters in Jprime kept (0-based indices into the base net)."""
    Jprime = set(Jprime)
    if not Jprime <= set(G.J):
        raise InputError("restriction set must be a subset of the counter set J")
    keep = sorted(set(G.I) | Jprime)
    base = restrict_net(G.base, keep)
    pos = {c: k for k, c in enumerate(keep)}
    return Pns(base, tuple(pos[i] for i in G.I), G.states, G.edges)


def is_proper(G: Pns) -> bool:
    """Q is closed under the steps of the restricted net and strongly connected."""
    index = set(G.states)
    for p in G.states:
        for act in G.base.actions:
            c = _project(act.consume, G.I)
            if leq(c, p):
                q = tuple(v - u + w for v, u, w in zip(p, c, _project(act.produce, G.I)))
                if q not in index:
                    return False
    return _strongly_connected(len(G.states), G.edges)


def simple_cycles(G: Pns, budget: int = DEFAULT_CYCLE_BUDGET) -> list[tuple[tuple[int, int, int], ...]]:
    """Every simple cycle of the edge multigraph, once, rooted at its least state."""
    out_edges = G.out_edges()
    cycles = []
    for s in range(len(G.states)):
        # depth-first over paths s -> ... using only states > s
        stack = [(s, iter(out_edges[s]))]
        path: list[tuple[int, int, int]] = []
        on_path = {s}
        while stack:
            u, it = stack[-1]
            e = next(it, None)
            if e is None:
                stack.pop()
                if path:
                    on_path.discard(path.pop()[2])
                continue
            v = e[2]
            if v == s:
                cycles.append(tuple(path + [e]))
                if len(cycles) > budget:
                    raise BudgetExceeded(f"more than {budget} simple cycles", budget)
            elif v > s and v not in on_path:
                path.append(e)
                on_path.add(v)
                stack.append((v, iter(out_edges[v])))
    return cycles


def simple_cycle_net(G: Pns, budget: int = DEFAULT_CYCLE_BUDGET) -> Net:
    """The |J|-dim net with one action per distinct simple-cycle displacement."""
    n = len(G.J)
    zs = set()
    for cyc in simple_cycles(G, budget):
        z = [0] * n
        for e in cyc:
            for k, v in enumerate(G.edge_displacement(e)):
                z[k] += v
        zs.add(tuple(z))
    actions = tuple(
        Action(f"sc{k}", tuple(max(-v, 0) for v in z), tuple(max(v, 0) for v in z))
        for k, z in enumerate(sorted(zs)))
    names = None
    if G.base.place_names is not None:
        names = tuple(G.base.place_names[j] for j in G.J)
    A_sc = Net(n, actions, f"{G.base.name}-sc", names)
    bound = net_norm(G.base) * len(G.states)
    if net_norm(A_sc) > bound:
        raise AssertionError(f"simple-cycle net norm {net_norm(A_sc)} exceeds {bound}")
    return A_sc


def _group(G: Pns) -> Lattice:
    if "group" not in G._cache:
        A_sc = simple_cycle_net(G)
        G._cache["group"] = Lattice(A_sc.dim, tuple(canonical(A_sc.deltas())))
    return G._cache["group"]


def simple_paths(G: Pns, p: int, q: int, budget: int = DEFAULT_CYCLE_BUDGET):
    """Counter displacements of all simple paths from state p to state q."""
    if p == q:
        return {(0,) * len(G.J)}
    out_edges = G.out_edges()
    found = set()
    count = 0
    stack = [(p, iter(out_edges[p]), (0,) * len(G.J))]
    on_path = {p}
    while stack:
        u, it, disp = stack[-1]
        e = next(it, None)
        if e is None:
            stack.pop()
            on_path.discard(u)
            continue
        v = e[2]
        if v in on_path:
            continue
        nd = tuple(a + b for a, b in zip(disp, G.edge_displacement(e)))
        if v == q:
            found.add(nd)
            count += 1
            if count > budget:
                raise BudgetExceeded(f"more than {budget} simple paths", budget)
            continue
        on_path.add(v)
        stack.append((v, iter(out_edges[v]), nd))
    return found


def pns_virtual_reach(G: Pns, src: PnsConf | tuple, dst: PnsConf | tuple) -> bool:
    """(p,x) ⇝* (q,y): some simple path p -> q plus a group element accounts for y - x."""
    if not G.reversible:
        raise StructuralError("PNS has no zero-displacement cycle through all edges")
    p, x = (src.state, src.counters) if isinstance(src, PnsConf) else src
    q, y = (dst.state, dst.counters) if isinstance(dst, PnsConf) else dst
    n = len(G.J)
    if len(x) != n or len(y) != n:
        raise InputError(f"counter vectors must have length {n}")
    L = _group(G)
    diff = vsub(y, x)
    return any(lattice_member(L, vsub(diff, disp))
               for disp in simple_paths(G, G.state_index(p), G.state_index(q)))


def extract_candidates(net: Net, X, C: int) -> list[tuple[tuple[int, ...], Pns, PnsConf]]:
    """Component sets I with some x in X whose counters x|J all reach C."""
    X = _markings(X)
    _check_bottom_scc(net, X, 10 ** 6)
    out = []
    d = net.dim
    for size in range(d + 1):
        for I in combinations(range(d), size):
            J = [j for j in range(d) if j not in I]
            x = next((x for x in X if all(x[j] >= C for j in J)), None)
            if x is None:
                continue
            G = build_pns(net, X, I)
            out.append((I, G, PnsConf(_project(x, I), _project(x, J))))
    return out


# ----------------------------------------------------------- extractor machinery

def _lam(lam: Sequence[int], k: int) -> Optional[int]:
    """λ_k with λ_0 = 0; None stands for +infinity past the end."""
    if k == 0:
        return 0
    return lam[k - 1] if k <= len(lam) else None


def _qualifies(x, Jp: frozenset, lam) -> bool:
    k = len(Jp)
    lo, hi = _lam(lam, k), _lam(lam, k + 1)
    for i, v in enumerate(x):
        if i in Jp:
            if not v < lo:
                return False
        elif hi is not None and v < hi:
            return False
    return True


def jlambda_partition(x: Sequence[int], lam: Sequence[int]) -> frozenset[int]:
    """The maximal J' with x(i) < λ_|J'| on J' and x(i) >= λ_{|J'|+1} off J'."""
    if len(lam) < len(x):
        raise InputError(f"need {len(x)} extractor values, got {len(lam)}")
    if any(a > b for a, b in zip(lam, lam[1:])):
        raise InputError("extractor values must be nondecreasing")
    n = len(x)
    good = [frozenset(s) for k in range(n + 1) for s in combinations(range(n), k)
            if _qualifies(x, frozenset(s), lam)]
    maximal = [s for s in good if not any(s < t for t in good)]
    assert len(maximal) == 1, f"no unique maximal partition set for {tuple(x)}: {maximal}"
    return maximal[0]


def dif(x: Sequence[int], Jprime: Iterable[int], lam: Sequence[int]) -> int:
    """Distance of x from the class of vectors whose partition set is J'."""
    Jp = set(Jprime)
    k = len(Jp)
    lo, hi = _lam(lam, k), _lam(lam, k + 1)
    vals = [0]
    for i, v in enumerate(x):
        if i in Jp:
            if v >= lo:
                vals.append(v - (lo - 1))
        elif hi is not None and v < hi:
            vals.append(hi - v)
    return max(vals)


def subsets_in_order(n: int) -> list[tuple[int, ...]]:
    return [s for k in range(n + 1) for s in combinations(range(n), k)]


def group_reach_system(deltas: Sequence[Sequence[int]], n: int) -> LinearSystem:
    """System over (x, y) in Z^2n: y - x lies in the group spanned by deltas."""
    S = group_to_linsys(Lattice(n, tuple(canonical(deltas))))
    rows = []
    for i in range(n):
        row = [0] * (2 * n)
        row[i] = -1
        row[n + i] = 1
        rows.append(row)
    return substitute(S, rows, 2 * n)


def build_sbar(A_sc: Net, C: int, B0: int, anchors: Mapping) -> LinearSystem:
    """The system tying shared counters x to one y-block per subset J' of J.

    Variables are x_1..x_n followed by y^{J'} blocks for J' in
    subsets_in_order(n).  Each block says x ⇝* y^{J'} in the displacement
    group and y^{J'} agrees with anchors[J'] up to the threshold B0.
    """
    n = A_sc.dim
    if n > MAX_SBAR_COUNTERS:
        raise InputError(f"|J| = {n} exceeds {MAX_SBAR_COUNTERS}; "
                         f"the system would have {n + n * 2 ** n} variables")
    subsets = subsets_in_order(n)
    anchors = {tuple(sorted(k)): tuple(v) for k, v in anchors.items()}
    for s in subsets:
        if s not in anchors:
            raise InputError(f"missing anchor for J' = {set(s) or '{}'}")
        if len(anchors[s]) != n:
            raise InputError(f"anchor for {s} must have length {n}")
    dim = n + n * len(subsets)
    parts = [geq([1 if j == i else 0 for j in range(dim)], C) for i in range(n)]
    reach2 = group_reach_system(A_sc.deltas(), n)
    for b, s in enumerate(subsets):
        off = n + b * n
        rows = [[1 if j == i else 0 for j in range(dim)] for i in range(n)]
        rows += [[1 if j == off + i else 0 for j in range(dim)] for i in range(n)]
        parts.append(substitute(reach2, rows, dim).formula)
        for i, v in enumerate(anchors[s]):
            e = [1 if j == off + i else 0 for j in range(dim)]
            parts.append(eq(e, v) if v <= B0 else geq(e, B0 + 1))
    return LinearSystem(dim, conj(parts))


def min_sleq_norm(A_sc: Net) -> int:
    gens = canonical(A_sc.deltas())
    mins = min_sleq_monoid(gens + [tuple(-v for v in g) for g in gens], A_sc.dim)
    return max((vnorm(z) for z in mins), default=0)


def compute_b0(A_sc: Net, lam: Sequence[int]) -> int:
    from .bounds import eval_bound
    lam_j = lam[A_sc.dim - 1] if A_sc.dim else 0
    return eval_bound("b0", {"lambda_j": lam_j, "min_sleq_norm": min_sleq_norm(A_sc)})


def find_anchors(A_sc: Net, x0: Sequence[int], C: int, lam: Sequence[int],
                 radius: int) -> dict[tuple[int, ...], Vector]:
    """Heuristic anchors: per J', a dif-minimizing y >= C with x0 ⇝* y, y <= radius.

    The search box is a caller choice; a true minimizer may lie outside it.
    """
    from itertools import product
    n = A_sc.dim
    L = Lattice(n, tuple(canonical(A_sc.deltas())))
    cands = [y for y in product(range(C, radius + 1), repeat=n)
             if lattice_member(L, vsub(y, x0))]
    if not cands:
        raise InputError("no vector in the search box is virtually reachable from x0")
    return {s: min(cands, key=lambda y: (dif(y, s, lam), y)) for s in subsets_in_order(n)}


# ---------------------------------------------------------------------- export

def pns_to_json(G: Pns) -> dict:
    return {
        "net": serialize_net(G.base),
        "I": [i + 1 for i in G.I],
        "J": [j + 1 for j in G.J],
        "states": [list(q) for q in G.states],
        "edges": [[p, G.base.actions[a].name, q] for p, a, q in G.edges],
        "reversible": G.reversible,
        "norm": G.norm,
    }


def pns_from_json(data: Mapping | str) -> Pns:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InputError(f"line {e.lineno}: invalid JSON: {e.msg}") from None
    try:
        net = parse_net(data["net"]).net
        I = tuple(i - 1 for i in data["I"])
        states = tuple(tuple(q) for q in data["states"])
        edges = tuple((p, net.action_index(a), q) for p, a, q in data["edges"])
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed PNS document: {e}") from None
    G = Pns(net, I, states, edges)
    for p, a, q in edges:
        if not (0 <= p < len(states) and 0 <= q < len(states)):
            raise InputError(f"edge ({p}, {a}, {q}) refers to a missing state")
        act = net.actions[a]
        c = _project(act.consume, I)
        if not leq(c, states[p]) or \
                tuple(v - u + w for v, u, w in zip(states[p], c, _project(act.produce, I))) != states[q]:
            raise InputError(f"edge ({p}, {act.name}, {q}) is not a step of the restricted net")
    return G
