import random
from itertools import product

import pytest

import oracles as O
from pnet.errors import InputError, StateSpaceOverflow
from pnet.net import Action, Net
from pnet.reach import (bottom_sccs, dead_nodes, graph_to_dot, graph_to_json, in_up_area,
                        is_dead, is_live, is_live_backward, is_quasi_dead, liveness_verdict,
                        reachability_graph, stratum, structural_liveness_search)
from randgen import random_net

X0 = (1, 0, 1, 0, 2)


def test_a1_graph_is_a_four_step_cycle(a1):
    g = reachability_graph(a1, X0)
    assert list(g.nodes) == sorted(g.nodes)
    assert len(g) == 4 and g.num_edges == 4
    assert g.nodes[g.roots[0]] == X0
    (scc,) = bottom_sccs(g)
    assert set(scc.markings) == set(g.nodes) and X0 in scc


def test_dead_marking(a1):
    assert is_dead(a1, (0, 0, 1, 1, 1)) == (True, 0)
    assert not is_live(a1, (0, 0, 1, 1, 1))
    assert is_dead(a1, X0) == (False, None)
    assert is_quasi_dead(a1, (0, 0, 1, 1, 1), 0)
    assert not is_quasi_dead(a1, X0, 10)


def test_verdict_and_exports(a1):
    v = liveness_verdict(a1, X0, marking_name="x0")
    assert v["live"] and not v["dead"] and v["nodes"] == 4 and v["bottom_sccs"] == 1
    data = graph_to_json(reachability_graph(a1, X0), a1)
    assert data["net"] == "A1" and len(data["edges"]) == 4
    assert {e[1] for e in data["edges"]} == {"a1", "a2", "a3", "a4"}
    dot = graph_to_dot(reachability_graph(a1, X0), a1)
    assert dot.startswith('digraph "A1"') and dot.count("->") == 4


def test_node_budget_overflow():
    grow = Net(1, (Action("g", (0,), (1,)),))
    with pytest.raises(StateSpaceOverflow):
        reachability_graph(grow, (0,), 50)


def test_search_requires_conservative_net():
    with pytest.raises(InputError):
        structural_liveness_search(Net(1, (Action("g", (0,), (1,)),)), 3)


def test_a1_search_finds_a_live_marking(a1):
    x = structural_liveness_search(a1, 6)
    assert x is not None and is_live(a1, x)


def test_stratum_order():
    pts = list(stratum((1, 2), 4))
    assert pts == [(0, 2), (2, 1), (4, 0)]
    assert list(stratum((), 0)) == [()]


def test_in_up_area():
    assert in_up_area((3, 0, 5), 3, [0, 2])
    assert not in_up_area((3, 0, 5), 3, [1])


def _mass_preserving(rng, d, k):
    acts = []
    for i in range(k):
        pre = tuple(rng.randint(0, 2) for _ in range(d))
        post = [0] * d
        for _ in range(sum(pre)):
            post[rng.randrange(d)] += 1
        acts.append(Action(f"t{i}", pre, tuple(post)))
    return Net(d, tuple(acts))


def test_liveness_agrees_with_oracle_and_backward_check():
    rng = random.Random(5)
    for _ in range(60):
        net = _mass_preserving(rng, rng.randint(1, 3), rng.randint(1, 3))
        cons = [a.consume for a in net.actions]
        prod = [a.produce for a in net.actions]
        for x in product(range(3), repeat=net.dim):
            want = O.live_oracle(cons, prod, x)
            assert is_live(net, x) == want == is_live_backward(net, x), (net, x)
            g = reachability_graph(net, x)
            assert set(g.nodes) == O.reach_set(cons, prod, x)
            assert is_dead(net, x)[0] == (len({a for _, a, _ in g.edges}) < len(net.actions))


def test_non_conservative_reach_set_matches_oracle():
    rng = random.Random(6)
    for i in range(60):
        net = random_net(rng, rng.randint(1, 3), rng.randint(1, 3), name=f"n{i}")
        cons = [a.consume for a in net.actions]
        prod = [a.produce for a in net.actions]
        x = tuple(rng.randint(0, 2) for _ in range(net.dim))
        try:
            g = reachability_graph(net, x, 2000)
        except StateSpaceOverflow:
            continue
        assert set(g.nodes) == O.reach_set(cons, prod, x)
        dead = dead_nodes(g)
        assert len(dead) == len(g)
