import json
import random
from collections import deque
from itertools import permutations, product

import pytest

from pnet.errors import InputError, StructuralError
from pnet.net import Action, Net, net_norm
from pnet.pns import (PnsConf, build_pns, build_sbar, compute_b0, dif, extract_candidates,
                      find_anchors, group_reach_system, is_proper, jlambda_partition,
                      min_sleq_norm, pns_from_json, pns_to_json, pns_virtual_reach,
                      restrict_pns, simple_cycle_net, simple_cycles, simple_paths,
                      subsets_in_order)
from pnet.linsys import evaluate
from pnet.reach import bottom_sccs, reachability_graph

X0 = (1, 0, 1, 0, 2)


@pytest.fixture(scope="module")
def a1_pns(a1):
    X = bottom_sccs(reachability_graph(a1, X0))[0]
    return build_pns(a1, X, [0, 1, 2, 3])


def _cycle_oracle(G):
    """Simple cycles as (state sequence, edge choice) by permutation enumeration."""
    n = len(G.states)
    by_pair = {}
    for e in G.edges:
        by_pair.setdefault((e[0], e[2]), []).append(e)
    out = set()
    for s in range(n):
        others = [v for v in range(s + 1, n)]
        for k in range(len(others) + 1):
            for seq in permutations(others, k):
                walk = (s,) + seq + (s,)
                choices = [by_pair.get((walk[i], walk[i + 1]), []) for i in range(len(walk) - 1)]
                for pick in product(*choices):
                    out.add(tuple(pick))
    return out


def _walk_oracle(G, src, dst, box):
    """Forward search over (state, counters) with counters kept in [-box, box]."""
    start = (G.state_index(src[0]), tuple(src[1]))
    goal = (G.state_index(dst[0]), tuple(dst[1]))
    seen = {start}
    todo = deque([start])
    out = G.out_edges()
    while todo:
        u, x = todo.popleft()
        if (u, x) == goal:
            return True
        for e in out[u]:
            y = tuple(a + b for a, b in zip(x, G.edge_displacement(e)))
            if max(map(abs, y), default=0) <= box and (e[2], y) not in seen:
                seen.add((e[2], y))
                todo.append((e[2], y))
    return False


def test_a1_pns_shape(a1_pns, a1):
    G = a1_pns
    assert G.J == (4,) and len(G.states) == 4 and len(G.edges) == 4
    assert is_proper(G) and G.reversible
    assert G.norm == 2
    A_sc = simple_cycle_net(G)
    assert A_sc.dim == 1 and net_norm(A_sc) <= net_norm(a1) * len(G.states)
    assert set(simple_cycles(G)) == _cycle_oracle(G)


def test_a1_virtual_reach_matches_walk_search(a1_pns):
    G = a1_pns
    for p, q in product(G.states, repeat=2):
        for u, v in product(range(5), repeat=2):
            want = _walk_oracle(G, (p, (u,)), (q, (v,)), 30)
            assert pns_virtual_reach(G, PnsConf(p, (u,)), PnsConf(q, (v,))) == want


def test_simple_paths_self_is_zero(a1_pns):
    assert simple_paths(a1_pns, 0, 0) == {(0,)}
    assert all(len(d) == 1 for d in simple_paths(a1_pns, 0, 2))


def test_json_roundtrip(a1_pns):
    data = pns_to_json(a1_pns)
    assert data["I"] == [1, 2, 3, 4] and data["J"] == [5]
    G = pns_from_json(json.dumps(data))
    assert G.states == a1_pns.states and G.edges == a1_pns.edges
    with pytest.raises(InputError):
        pns_from_json("{not json")
    with pytest.raises(InputError):
        pns_from_json({"net": data["net"]})


def test_bad_inputs(a1):
    with pytest.raises(StructuralError):
        build_pns(a1, [X0], [0])
    X = bottom_sccs(reachability_graph(a1, X0))[0]
    with pytest.raises(InputError):
        build_pns(a1, X, [7])
    G = build_pns(a1, X, [0, 1, 2, 3])
    with pytest.raises(InputError):
        restrict_pns(G, [0])
    with pytest.raises(InputError):
        pns_virtual_reach(G, (G.states[0], (0, 0)), (G.states[0], (0,)))


def test_restrict_drops_counters(a1):
    X = bottom_sccs(reachability_graph(a1, X0))[0]
    G = build_pns(a1, X, [0, 1])
    H = restrict_pns(G, [4])
    assert H.base.dim == 3 and len(H.J) == 1 and H.states == G.states


def test_extract_candidates(a1):
    X = bottom_sccs(reachability_graph(a1, X0))[0]
    cands = extract_candidates(a1, X, 1)
    for I, G, conf in cands:
        assert G.I == I
        assert all(v >= 1 for v in conf.counters)
        assert conf.state in G.states
    assert (0, 1, 2, 3) in [c[0] for c in cands]


def _mass_preserving(rng, d, k):
    acts = []
    for i in range(k):
        pre = tuple(rng.randint(0, 2) for _ in range(d))
        post = [0] * d
        for _ in range(sum(pre)):
            post[rng.randrange(d)] += 1
        acts.append(Action(f"t{i}", pre, tuple(post)))
    return Net(d, tuple(acts))


def test_random_pns_cycles_and_reach():
    rng = random.Random(7)
    checked = 0
    for _ in range(300):
        if checked >= 25:
            break
        d = rng.randint(2, 3)
        net = _mass_preserving(rng, d, rng.randint(2, 4))
        x = tuple(rng.randint(0, 2) for _ in range(d))
        for X in bottom_sccs(reachability_graph(net, x)):
            I = [i for i in range(d) if rng.random() < 0.6]
            if len(I) == d:
                I.pop()
            try:
                G = build_pns(net, X, I)
            except StructuralError:
                continue
            assert set(simple_cycles(G)) == _cycle_oracle(G)
            if not G.reversible or len(G.J) > 2:
                continue
            checked += 1
            for p, q in product(G.states[:2], repeat=2):
                for u in product(range(3), repeat=len(G.J)):
                    v = tuple(rng.randint(0, 3) for _ in G.J)
                    want = _walk_oracle(G, (p, u), (q, v), 14)
                    assert pns_virtual_reach(G, (p, u), (q, v)) == want, (net, X, I)
    assert checked >= 10


def test_partition_and_dif():
    lam = [2, 5, 9]
    assert jlambda_partition((0, 1, 7), lam) == frozenset({0, 1, 2})
    assert jlambda_partition((0, 1, 9), lam) == frozenset({0, 1})
    assert jlambda_partition((10, 10, 10), lam) == frozenset()
    assert dif((0, 1, 9), {0, 1}, lam) == 0
    assert dif((3, 1, 9), {0, 1}, lam) == 0
    assert dif((6, 1, 9), {0, 1}, lam) == 2
    assert dif((0, 1, 7), {0, 1}, lam) == 2
    assert dif((0, 1, 9), set(), lam) == 2
    with pytest.raises(InputError):
        jlambda_partition((0, 1), [3, 1])
    with pytest.raises(InputError):
        jlambda_partition((0, 1), [3])


def test_partition_is_zero_distance_class():
    lam = [2, 5, 9]
    for x in product(range(11), repeat=3):
        Jp = jlambda_partition(x, lam)
        assert dif(x, Jp, lam) == 0


def test_subsets_order():
    assert subsets_in_order(2) == [(), (0,), (1,), (0, 1)]


def test_sbar_on_a1(a1_pns):
    A_sc = simple_cycle_net(a1_pns)
    lam = [3]
    B0 = compute_b0(A_sc, lam)
    assert B0 >= min_sleq_norm(A_sc)
    anchors = find_anchors(A_sc, (2,), 1, lam, 6)
    S = build_sbar(A_sc, 1, B0, anchors)
    assert S.dim == 1 + 1 * 2
    R = group_reach_system(A_sc.deltas(), 1)
    for u, v in product(range(6), repeat=2):
        assert evaluate(R, (u, v)) == pns_virtual_reach(a1_pns, (a1_pns.states[0], (u,)),
                                                       (a1_pns.states[0], (v,)))
    with pytest.raises(InputError):
        build_sbar(A_sc, 1, B0, {})
