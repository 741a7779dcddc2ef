from pathlib import Path

import pytest

from pnet.errors import InputError
from pnet.reach import reachability_graph
from pnet.reductions import (STAGES, CoverInstance, conservative_to_pp, cover_to_scover, covers,
                             instance_answer, least_live_k, normalize, parse_presentation,
                             run_chain, semigroup_to_cover, serialize_presentation)
from pnet.structural import classify

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def _load(name):
    return parse_presentation((FIX / f"{name}.pres").read_text())


@pytest.fixture(scope="module")
def abc_chain():
    return run_chain(_load("abc_pos"), "sl")


def test_stage_sizes(abc_chain):
    sizes = {k: (v.net.dim, len(v.net.actions)) for k, v in abc_chain.items()}
    assert sizes == {"cover": (3, 2), "scover": (6, 8), "ppscover": (10, 14), "sl": (13, 39)}
    assert list(abc_chain) == list(STAGES)


def test_partial_chain():
    out = run_chain(_load("free_neg"), "scover")
    assert set(out) == {"cover", "scover"}
    with pytest.raises(InputError):
        run_chain(_load("free_neg"), "nope")


def test_presentation_roundtrip_and_errors():
    P = _load("abc_pos")
    assert parse_presentation(serialize_presentation(P)) == P
    for text in ["eq a = b\nask a covers b", "letters a\nask a covers b",
                 "letters a b\nask a b", "letters a b\neq a b\nask a covers b",
                 "letters a a\nask a covers a", "letters a\nfoo\nask a covers a",
                 "letters a b"]:
        with pytest.raises(InputError):
            parse_presentation(text)


def test_normalize_splits_repeated_letters():
    P = parse_presentation("letters a b\neq a a = b\nask a covers b")
    assert not P.normalized
    with pytest.raises(InputError):
        semigroup_to_cover(P)
    Q = normalize(P)
    assert Q.normalized and "a_1" in Q.alphabet
    assert (("a_1",), ("a",)) in Q.equations
    inst = semigroup_to_cover(Q)
    assert classify(inst.net).strongly_reversible


def _control_places(net):
    return [i for i, n in enumerate(net.place_names) if n == "run" or n.startswith("ctrl:")]


def test_single_control_token_invariant(abc_chain):
    pp = conservative_to_pp(abc_chain["scover"])
    ctrl = _control_places(pp.net)
    for a in pp.net.actions:
        assert sum(a.consume[i] for i in ctrl) == 1
        assert sum(a.produce[i] for i in ctrl) == 1


def test_pp_simulation_preserves_reachability(abc_chain):
    sc = abc_chain["scover"].net
    pp = conservative_to_pp(abc_chain["scover"])
    ctrl = _control_places(pp.net)
    run = pp.p_run
    for x in [(1, 0, 0, 1, 0, 0), (0, 1, 1, 0, 0, 1), (1, 0, 0, 2, 1, 0)]:
        want = set(reachability_graph(sc, x).nodes)
        start = list(x) + [0] * (pp.net.dim - sc.dim)
        start[run] = 1
        got = {y[:sc.dim] for y in reachability_graph(pp.net, start).nodes
               if y[run] == 1 and all(y[i] == 0 for i in ctrl if i != run)}
        assert got == want, x


def test_store_balances_tokens(abc_chain):
    assert classify(abc_chain["scover"].net).one_conservative
    cover = abc_chain["cover"]
    assert cover.header() == ["stage cover p_init=a p_cov=b"]
    assert "p_store=" in abc_chain["scover"].header()[0]


def test_cover_answers():
    for name, want in [("abc_pos", True), ("free_neg", False), ("abc_neg", False)]:
        chain = run_chain(_load(name), "ppscover")
        for stage in ("cover", "scover", "ppscover"):
            assert instance_answer(chain[stage]) is want, (name, stage)


def test_covers_budget():
    chain = run_chain(_load("abc_pos"), "cover")
    net = chain["cover"].net
    assert covers(net, (1, 0, 0), (0, 1, 0)) is True
    assert covers(net, (0, 1, 0), (1, 0, 0)) is False


def test_sl_certificate_and_marking(abc_chain):
    sl = abc_chain["sl"]
    seq, disp = sl.certificate()
    assert not any(disp) and seq[0] == "a_cov"
    x = sl.initial_marking(2)
    assert x[sl.p_init] == 1 and x[sl.p_store] == 3 and sum(x) == 4


def test_negative_sl_has_no_small_live_initial_marking():
    sl = run_chain(_load("free_neg"), "sl")["sl"]
    assert least_live_k(sl, 3) is None


def test_instance_validation():
    chain = run_chain(_load("abc_pos"), "cover")
    with pytest.raises(InputError):
        from pnet.reductions import scover_to_ppscover
        scover_to_ppscover(chain["cover"])
    assert isinstance(cover_to_scover(chain["cover"]), CoverInstance)


def test_positive_sl_least_live_k(abc_chain):
    assert least_live_k(abc_chain["sl"], 3) == 1
