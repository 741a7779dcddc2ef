import json

import jsonschema
import pytest

from conftest import FIXTURES, load_schema
from pnet.cli import run

A1 = str(FIXTURES / "a1.net")


def _json(capsys, argv, code=0):
    assert run(argv + ["--output", "json"]) == code
    return json.loads(capsys.readouterr().out)


CASES = [
    ("check", ["check", A1], 0),
    ("live", ["live", A1, "--marking", "x0"], 0),
    ("live", ["live", A1, "--marking", "dead"], 1),
    ("reach_graph", ["reach-graph", A1, "--marking", "x0"], 0),
    ("structural_live", ["structural-live", A1, "--weight-budget", "6"], 0),
    ("vector_set", ["hilbert", str(FIXTURES / "chain.mat")], 0),
    ("vector_set", ["minsol-eq", str(FIXTURES / "chain.mat"), "1,0"], 0),
    ("vector_set", ["minsol-geq", str(FIXTURES / "chain.mat"), "1,1"], 0),
    ("vector_set", ["min-sleq", str(FIXTURES / "x23.vecs")], 0),
    ("solve", ["solve", str(FIXTURES / "odd5.sys")], 0),
    ("system", ["encode-lattice", str(FIXTURES / "x23.vecs")], 0),
    ("system", ["vreach-system", A1], 0),
    ("pns", ["pns-build", A1, "--scc-from", "x0", "--I", "1,2,3,4"], 0),
    ("reduce", ["reduce", "sl", str(FIXTURES / "abc_pos.pres")], 0),
    ("reduce", ["reduce", "cover", str(FIXTURES / "free_neg.pres")], 0),
    ("bounds", ["bounds", "f_dead", "--param", "m=2", "--param", "d=2"], 0),
    ("bounds", ["bounds", "rackoff_g", "--param", "m=2", "--param", "d=2"], 0),
    ("bounds", ["bounds", "lambda_extract", "--param", "m=2", "--param", "d=2",
                "--plugin", "f=f_scc"], 0),
]


@pytest.mark.parametrize("schema, argv, code", CASES, ids=[" ".join(c[1][:1]) + str(i)
                                                           for i, c in enumerate(CASES)])
def test_json_reports_match_schema(capsys, schema, argv, code):
    data = _json(capsys, argv, code)
    jsonschema.validate(data, load_schema(schema))


def test_simple_cycles_from_pns_json(capsys, tmp_path):
    data = _json(capsys, ["pns-build", A1, "--scc-from", "x0", "--I", "1,2,3,4"])
    p = tmp_path / "g.json"
    p.write_text(json.dumps(data))
    out = _json(capsys, ["simple-cycles", str(p)])
    jsonschema.validate(out, load_schema("simple_cycles"))
    assert int(out["norm_bound"]) == 8


def test_report_contents(capsys):
    assert _json(capsys, ["hilbert", str(FIXTURES / "chain.mat")])["vectors"] == [["1", "1", "1"]]
    assert _json(capsys, ["solve", str(FIXTURES / "odd5.sys")])["solution"] == ["5"]
    assert _json(capsys, ["bounds", "f_dead", "--param", "m=2", "--param", "d=2"])["value"] == "78"
    check = _json(capsys, ["check", A1])
    assert check["conservative"] and check["reversible"] and not check["strongly_reversible"]
    live = _json(capsys, ["live", A1, "--marking", "dead"], 1)
    assert live["dead"] and live["dead_action"] == "a1"


def test_text_mode(capsys):
    assert run(["live", A1, "--marking", "x0"]) == 0
    assert capsys.readouterr().out.strip() == "live"
    assert run(["reach-graph", A1, "--marking", "x0"]) == 0
    assert capsys.readouterr().out.startswith('digraph "A1"')
    assert run(["reduce", "sl", str(FIXTURES / "abc_pos.pres")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# stage sl p_init=") and "places 13" in out


@pytest.mark.parametrize("argv", [
    ["check", "/no/such/file"],
    ["live", A1, "--marking", "nope"],
    ["live", A1],
    ["structural-live", A1, "--weight-budget", "0"],
    ["minsol-eq", str(FIXTURES / "chain.mat"), "1,x"],
    ["minsol-eq", str(FIXTURES / "chain.mat"), "1,2,3"],
    ["bounds", "pottier", "--param", "l1=1"],
    ["bounds", "pottier", "--param", "l1"],
    ["bounds", "lambda_extract", "--param", "m=1", "--param", "d=1", "--plugin", "f=nope"],
    ["pns-build", A1, "--scc-from", "x0", "--I", "1,2,3,4", "--scc-index", "3"],
    ["pns-build", A1, "--scc-from", "x0", "--I", "0"],
    ["vreach-system", str(FIXTURES / "chain.mat")],
    ["nope"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_budget_exit_3(capsys, tmp_path):
    grow = tmp_path / "grow.net"
    grow.write_text("net G\nplaces 1\naction g 0 -> 1\nmarking z 0\n")
    assert run(["live", str(grow), "--marking", "z", "--node-budget", "10"]) == 3
    assert "budget" in capsys.readouterr().err
    m = tmp_path / "wide.mat"
    m.write_text("1 4\n5 -7 3 -2\n")
    assert run(["hilbert", str(m), "--budget", "3"]) == 3


def test_negative_verdicts_exit_1(capsys, tmp_path):
    p = tmp_path / "u.sys"
    p.write_text("(system 1 (and (geq (1) 3) (geq (-1) -2)))")
    assert run(["solve", str(p)]) == 1
    q = tmp_path / "dead.net"
    q.write_text("net D\nplaces 1\naction t 2 -> 2\n")
    assert run(["structural-live", str(q), "--weight-budget", "1"]) == 1
