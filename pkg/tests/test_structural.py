import random

from pnet.net import Action, Net, restrict_net
from pnet.structural import (classify, conservativeness_witness, is_one_conservative, is_ordinary,
                             is_pp_net, is_strongly_reversible, reversibility_witness,
                             structural_boundedness)
from randgen import random_net


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def test_a1_classification(a1):
    r = classify(a1)
    r.validate(a1)
    assert r.conservative and r.reversible and r.structurally_bounded
    assert not r.strongly_reversible
    w = r.conservative_witness
    assert all(_dot(a.delta, w) == 0 for a in a1.actions) and min(w) >= 1


def test_a2_is_not_conservative(a1):
    A2 = restrict_net(a1, [0, 1, 2, 3])
    assert conservativeness_witness(A2) is None
    assert not classify(A2).conservative


def test_small_classes():
    swap = Net(2, (Action("f", (1, 0), (0, 1)), Action("b", (0, 1), (1, 0))))
    assert is_one_conservative(swap) and is_strongly_reversible(swap)
    assert is_ordinary(swap) and is_pp_net(swap)
    assert reversibility_witness(swap) == (1, 1)
    grow = Net(1, (Action("g", (1,), (2,)),))
    assert conservativeness_witness(grow) is None
    assert structural_boundedness(grow)[0] is False
    assert reversibility_witness(grow) is None
    heavy = Net(2, (Action("h", (2, 0), (0, 1)),))
    assert not is_ordinary(heavy) and not is_pp_net(heavy)
    assert conservativeness_witness(heavy) == (1, 2)
    assert not is_one_conservative(heavy)


def test_empty_net_is_trivially_everything():
    r = classify(Net(2, ()))
    r.validate(Net(2, ()))
    assert r.conservative and r.reversible


def test_witnesses_are_certificates_on_random_nets():
    rng = random.Random(11)
    for i in range(150):
        net = random_net(rng, rng.randint(1, 4), rng.randint(1, 4), name=f"n{i}")
        r = classify(net)
        r.validate(net)
        w = conservativeness_witness(net)
        if w is not None:
            assert min(w) >= 1 and all(_dot(a.delta, w) == 0 for a in net.actions)
        m = reversibility_witness(net)
        if m is not None:
            assert min(m) >= 1
            assert all(sum(mi * a.delta[i] for mi, a in zip(m, net.actions)) == 0
                       for i in range(net.dim))
        bounded, bw = structural_boundedness(net)
        if bounded:
            assert min(bw) >= 1 and all(_dot(a.delta, bw) <= 0 for a in net.actions)
        if r.strongly_reversible:
            assert r.reversible
        if r.one_conservative:
            assert r.conservative


def test_report_json_uses_digit_strings(a1):
    data = classify(a1).to_json()
    assert all(isinstance(v, str) and v.isdigit() for v in data["conservative_witness"])
