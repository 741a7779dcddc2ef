"""Explicit-state reachability graphs, bottom SCCs and liveness checks."""

from __future__ import annotations

import json
from array import array
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InputError, StateSpaceOverflow
from .net import Marking, Net, as_marking
from .structural import conservativeness_witness

DEFAULT_NODE_BUDGET = 10 ** 6
DEFAULT_WEIGHT_BUDGET = 8


@dataclass(frozen=True)
class ReachGraph:
    """Nodes in lexicographic order; out-edges stored per node in action order.

    Edges live in CSR arrays (offsets, actions, targets) so graphs with
    millions of edges stay compact.
    """
    nodes: tuple[Marking, ...]
    offsets: array
    edge_actions: array
    edge_targets: array
    roots: tuple[int, ...]
    num_actions: int

    def __len__(self):
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edge_targets)

    def successors(self, u: int) -> Iterator[tuple[int, int]]:
        for k in range(self.offsets[u], self.offsets[u + 1]):
            yield self.edge_actions[k], self.edge_targets[k]

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, a, v) for u in range(len(self.nodes)) for a, v in self.successors(u)]

    def index(self, x: Sequence[int]) -> int:
        # nodes are sorted, so bisect instead of keeping a dict around
        from bisect import bisect_left
        x = tuple(x)
        i = bisect_left(self.nodes, x)
        if i == len(self.nodes) or self.nodes[i] != x:
            raise KeyError(x)
        return i

    def predecessors(self) -> list[list[int]]:
        pred: list[list[int]] = [[] for _ in self.nodes]
        for u in range(len(self.nodes)):
            for k in range(self.offsets[u], self.offsets[u + 1]):
                pred[self.edge_targets[k]].append(u)
        return pred

    def enablers(self) -> list[list[int]]:
        """For each action, the nodes where it is enabled."""
        out: list[list[int]] = [[] for _ in range(self.num_actions)]
        for u in range(len(self.nodes)):
            for k in range(self.offsets[u], self.offsets[u + 1]):
                out[self.edge_actions[k]].append(u)
        return out


@dataclass(frozen=True)
class BottomSCC:
    markings: tuple[Marking, ...]
    node_ids: tuple[int, ...]

    def __contains__(self, x):
        return tuple(x) in set(self.markings)


def _compile(net: Net):
    pre = [tuple((i, c) for i, c in enumerate(a.consume) if c) for a in net.actions]
    delta = [tuple((i, v) for i, v in enumerate(a.delta) if v) for a in net.actions]
    return list(enumerate(zip(pre, delta)))


def _build(net: Net, roots: Iterable[Marking], node_budget: int) -> ReachGraph:
    acts = _compile(net)
    index: dict[Marking, int] = {}
    order: list[Marking] = []
    for r in roots:
        if r not in index:
            index[r] = len(order)
            order.append(r)
            if len(order) > node_budget:
                raise StateSpaceOverflow(
                    f"more than {node_budget} markings; raise the node budget", node_budget)
    root_list = list(index)
    out_a: list[list[int]] = []
    out_v: list[list[int]] = []
    pos = 0
    while pos < len(order):
        x = order[pos]
        pos += 1
        la, lv = [], []
        for ai, (pre, delta) in acts:
            for i, c in pre:
                if x[i] < c:
                    break
            else:
                y = list(x)
                for i, v in delta:
                    y[i] += v
                y = tuple(y)
                j = index.get(y)
                if j is None:
                    j = len(order)
                    index[y] = j
                    order.append(y)
                    if j >= node_budget:
                        raise StateSpaceOverflow(
                            f"more than {node_budget} markings; raise the node budget",
                            node_budget)
                la.append(ai)
                lv.append(j)
        out_a.append(la)
        out_v.append(lv)
    # canonical relabelling: lexicographic node order
    perm = sorted(range(len(order)), key=order.__getitem__)
    new_id = [0] * len(order)
    for new, old in enumerate(perm):
        new_id[old] = new
    offsets = array("q", [0])
    eacts = array("i")
    etgts = array("q")
    for old in perm:
        eacts.extend(out_a[old])
        etgts.extend(new_id[v] for v in out_v[old])
        offsets.append(len(etgts))
    nodes = tuple(order[old] for old in perm)
    roots_new = tuple(new_id[index[r]] for r in root_list)
    return ReachGraph(nodes, offsets, eacts, etgts, roots_new, len(net.actions))


def reachability_graph(net: Net, x0: Sequence[int],
                       node_budget: int = DEFAULT_NODE_BUDGET) -> ReachGraph:
    x0 = as_marking(x0, net.dim)
    return _build(net, [x0], node_budget)


def _tarjan(graph: ReachGraph) -> list[list[int]]:
    """Iterative Tarjan; SCCs come out in reverse topological order."""
    n = len(graph.nodes)
    idx = [-1] * n
    low = [0] * n
    on = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    off, tgt = graph.offsets, graph.edge_targets
    for s in range(n):
        if idx[s] != -1:
            continue
        work = [(s, off[s])]
        idx[s] = low[s] = counter
        counter += 1
        stack.append(s)
        on[s] = True
        while work:
            u, k = work[-1]
            if k < off[u + 1]:
                work[-1] = (u, k + 1)
                v = tgt[k]
                if idx[v] == -1:
                    idx[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on[v] = True
                    work.append((v, off[v]))
                elif on[v] and idx[v] < low[u]:
                    low[u] = idx[v]
            else:
                work.pop()
                if work:
                    p = work[-1][0]
                    if low[u] < low[p]:
                        low[p] = low[u]
                if low[u] == idx[u]:
                    comp = []
                    while True:
                        v = stack.pop()
                        on[v] = False
                        comp.append(v)
                        if v == u:
                            break
                    comps.append(comp)
    return comps


def bottom_sccs(graph: ReachGraph) -> list[BottomSCC]:
    comps = _tarjan(graph)
    comp_of = [0] * len(graph.nodes)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    out = []
    for ci, comp in enumerate(comps):
        closed = all(comp_of[v] == ci for u in comp for _, v in graph.successors(u))
        if closed:
            ids = tuple(sorted(comp))
            out.append(BottomSCC(tuple(graph.nodes[i] for i in ids), ids))
    out.sort(key=lambda b: b.node_ids[0])
    return out


def _backward(pred: list[list[int]], seeds: Iterable[int], n: int) -> list[bool]:
    mark = [False] * n
    todo = deque()
    for s in seeds:
        if not mark[s]:
            mark[s] = True
            todo.append(s)
    while todo:
        v = todo.popleft()
        for u in pred[v]:
            if not mark[u]:
                mark[u] = True
                todo.append(u)
    return mark


def dead_nodes(graph: ReachGraph) -> list[bool]:
    """Node y is dead iff some action is enabled nowhere in R(y).

    Computed by backward closure: y is not dead iff for every action a it
    can reach a node enabling a.
    """
    n = len(graph.nodes)
    pred = graph.predecessors()
    alive = [True] * n
    for nodes_a in graph.enablers():
        back = _backward(pred, nodes_a, n)
        alive = [p and q for p, q in zip(alive, back)]
    return [not a for a in alive]


def live_nodes(graph: ReachGraph) -> list[bool]:
    """Node x is live iff it cannot reach a dead node."""
    dead = dead_nodes(graph)
    bad = _backward(graph.predecessors(), [i for i, d in enumerate(dead) if d], len(dead))
    return [not b for b in bad]


def is_dead(net: Net, x: Sequence[int],
            node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[bool, Optional[int]]:
    """Return (dead, witness action index) for the marking x."""
    g = reachability_graph(net, x, node_budget)
    fired = set(g.edge_actions)
    for a in range(len(net.actions)):
        if a not in fired:
            return True, a
    return False, None


def is_live(net: Net, x: Sequence[int], node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """x is live iff every bottom SCC of R(x) enables every action somewhere.

    Every node of R(x) reaches some bottom SCC and bottom SCCs are closed,
    so "every reachable marking can still reach an a-enabler" holds iff each
    bottom SCC contains an a-enabler.
    """
    g = reachability_graph(net, x, node_budget)
    return _live_by_sccs(g, len(net.actions))


def _live_by_sccs(g: ReachGraph, num_actions: int) -> bool:
    for b in bottom_sccs(g):
        acts = {a for u in b.node_ids for a, _ in g.successors(u)}
        if len(acts) < num_actions:
            return False
    return True


def is_live_backward(net: Net, x: Sequence[int], node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Independent liveness check: no node of R(x) is dead."""
    g = reachability_graph(net, x, node_budget)
    return not any(dead_nodes(g))


def stratum(weights: Sequence[int], total: int) -> Iterator[Marking]:
    """All x in N^d with <x, w> = total, in lexicographic order (w > 0)."""
    d = len(weights)
    if d == 0:
        if total == 0:
            yield ()
        return
    w0 = weights[0]
    for v in range(total // w0 + 1):
        for rest in stratum(weights[1:], total - v * w0):
            yield (v,) + rest


def structural_liveness_search(net: Net, weight_budget: int = DEFAULT_WEIGHT_BUDGET,
                               node_budget: int = DEFAULT_NODE_BUDGET,
                               weights: Optional[Sequence[int]] = None) -> Optional[Marking]:
    """First live marking in (weight, lexicographic) order, or None.

    Each stratum {x : <x, w> = W} is closed under firing for a conservative
    net, so one graph per stratum decides liveness of all its markings.
    """
    w = tuple(weights) if weights is not None else conservativeness_witness(net)
    if w is None:
        raise InputError(f"net {net.name} is not conservative")
    for W in range(weight_budget + 1):
        roots = list(stratum(w, W))
        if len(roots) > node_budget:
            raise StateSpaceOverflow(
                f"weight stratum {W} has {len(roots)} markings, over budget {node_budget}",
                node_budget)
        if not roots:
            continue
        g = _build(net, roots, node_budget)
        live = live_nodes(g)
        for i, ok in enumerate(live):
            if ok:
                return g.nodes[i]
    return None


def in_up_area(x: Sequence[int], C: int, J: Iterable[int]) -> bool:
    """x(j) >= C for every j in J."""
    return all(x[j] >= C for j in J)


def is_quasi_dead(net: Net, x: Sequence[int], depth: int,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Some execution of length <= depth from x reaches a dead marking."""
    g = reachability_graph(net, x, node_budget)
    dead = dead_nodes(g)
    root = g.roots[0]
    dist = {root: 0}
    todo = deque([root])
    while todo:
        u = todo.popleft()
        if dead[u]:
            return True
        if dist[u] == depth:
            continue
        for _, v in g.successors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                todo.append(v)
    return False


# ------------------------------------------------------------------ exports

def graph_to_json(g: ReachGraph, net: Net) -> dict:
    return {
        "net": net.name,
        "nodes": [list(x) for x in g.nodes],
        "edges": [[u, net.actions[a].name, v] for u, a, v in g.edges],
        "roots": list(g.roots),
    }


def graph_to_dot(g: ReachGraph, net: Net) -> str:
    lines = [f'digraph "{net.name}" {{']
    for i, x in enumerate(g.nodes):
        shape = "doublecircle" if i in g.roots else "ellipse"
        lines.append(f'  n{i} [label="({",".join(map(str, x))})", shape={shape}];')
    for u, a, v in g.edges:
        lines.append(f'  n{u} -> n{v} [label="{net.actions[a].name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def liveness_verdict(net: Net, x: Sequence[int], node_budget: int = DEFAULT_NODE_BUDGET,
                     marking_name: Optional[str] = None) -> dict:
    g = reachability_graph(net, x, node_budget)
    live = _live_by_sccs(g, len(net.actions))
    fired = set(g.edge_actions)
    dead_action = next((a.name for i, a in enumerate(net.actions) if i not in fired), None)
    return {
        "marking": marking_name,
        "values": [str(v) for v in x],
        "live": live,
        "dead": dead_action is not None,
        "dead_action": dead_action,
        "nodes": len(g),
        "edges": g.num_edges,
        "bottom_sccs": len(bottom_sccs(g)),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
