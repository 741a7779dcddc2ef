"""Command-line interface.

Exit codes: 0 success, 1 negative verdict of a decision subcommand,
2 input error, 3 budget overflow.  Reports go to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable, Optional, Sequence

from . import bounds, hilbert, lattice, linsys, pns, reach, reductions, structural
from .errors import BudgetExceeded, InputError, PnetError
from .net import Net, parse_net, serialize_net

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
MAX_RESIDUE_CLASSES = 10 ** 7

# plugin builtins; each satisfies m <= f(m, d)
RB_PLUGINS: dict[str, Callable[[int, int], int]] = {
    "identity": lambda m, d: m,
    "succ": lambda m, d: m + 1,
    "square": lambda m, d: m * m + m,
    "f_scc": bounds.f_scc,
    "f_dead": bounds.f_dead,
}
EXPONENT_PLUGINS: dict[str, Callable[[int], int]] = {
    "identity": lambda d: d,
    "succ": lambda d: d + 1,
}


class Report:
    """A result with a JSON form and a text form carrying the same verdict."""

    def __init__(self, data, text: str, code: int = EXIT_OK):
        self.data = data
        self.text = text
        self.code = code


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _positive(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def _index_set(s: str) -> list[int]:
    """'1,2,4' (1-based) -> [0, 1, 3]; the empty string is the empty set."""
    out = []
    for tok in s.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            v = int(tok)
        except ValueError:
            raise InputError(f"bad component index {tok!r}") from None
        if v < 1:
            raise InputError(f"component index {tok!r} must be at least 1")
        out.append(v - 1)
    return out


def _ints_arg(s: str) -> list[int]:
    """A vector given inline ('1,2,-3' or '1 2 -3') or as a file path."""
    text = _read(s) if os.path.exists(s) else s
    toks = text.replace(",", " ").split()
    try:
        return [int(t) for t in toks]
    except ValueError:
        bad = next(t for t in toks if not t.lstrip("+-").isdigit())
        raise InputError(f"expected an integer, got {bad!r}") from None


def _vec(v) -> list[str]:
    return [str(e) for e in v]


def _vecs_text(dim: int, vecs) -> str:
    return hilbert.serialize_vector_set(dim, vecs).rstrip("\n")


def _load_net(path: str):
    doc = parse_net(_read(path))
    return doc.net, doc.markings


def _marking(markings: dict, name: str, net: Net):
    if name in markings:
        return markings[name]
    raise InputError(f"net {net.name} has no marking named {name!r}")


# ---------------------------------------------------------------- subcommands

def cmd_check(a) -> Report:
    net, _ = _load_net(a.net)
    rep = structural.classify(net)
    rep.validate(net)
    data = {"net": net.name, **rep.to_json()}
    lines = [f"net {net.name}"]
    for k, v in rep.to_json().items():
        if isinstance(v, list):
            v = " ".join(v)
        lines.append(f"{k}: {'none' if v is None else v}")
    return Report(data, "\n".join(lines))


def cmd_live(a) -> Report:
    net, markings = _load_net(a.net)
    x = _marking(markings, a.marking, net)
    v = reach.liveness_verdict(net, x, a.node_budget, a.marking)
    text = "live" if v["live"] else "not live"
    if v["dead_action"]:
        text += f" (action {v['dead_action']} is dead)"
    return Report(v, text, EXIT_OK if v["live"] else EXIT_NEGATIVE)


def cmd_reach_graph(a) -> Report:
    net, markings = _load_net(a.net)
    g = reach.reachability_graph(net, _marking(markings, a.marking, net), a.node_budget)
    data = reach.graph_to_json(g, net)
    return Report(data, reach.graph_to_dot(g, net).rstrip("\n"))


def cmd_structural_live(a) -> Report:
    net, _ = _load_net(a.net)
    x = reach.structural_liveness_search(net, a.weight_budget, a.node_budget)
    data = {"net": net.name, "weight_budget": a.weight_budget,
            "live_marking": None if x is None else _vec(x)}
    if x is None:
        return Report(data, f"no live marking up to weight {a.weight_budget}", EXIT_NEGATIVE)
    return Report(data, "live marking " + " ".join(map(str, x)))


def cmd_hilbert(a) -> Report:
    B = hilbert.parse_matrix(_read(a.matrix))
    X = hilbert.hilbert_basis(B, budget=a.budget)
    return Report({"dim": B.ncols, "vectors": [_vec(x) for x in X]}, _vecs_text(B.ncols, X))


def _minsol(a, geq: bool) -> Report:
    C = hilbert.parse_matrix(_read(a.matrix))
    c = _ints_arg(a.rhs)
    f = hilbert.min_solutions_geq if geq else hilbert.min_solutions_eq
    X = f(C, c, budget=a.budget)
    return Report({"dim": C.ncols, "vectors": [_vec(x) for x in X]}, _vecs_text(C.ncols, X))


def cmd_min_sleq(a) -> Report:
    dim, gens = hilbert.parse_vector_set(_read(a.vecset))
    X = hilbert.min_sleq_monoid(gens, dim, budget=a.budget)
    return Report({"dim": dim, "vectors": [_vec(x) for x in X]}, _vecs_text(dim, X))


def cmd_solve(a) -> Report:
    S = linsys.parse_system(_read(a.system))
    x = linsys.solve_min(S, residue_budget=MAX_RESIDUE_CLASSES, budget=a.budget)
    if x is None:
        return Report({"satisfiable": False, "solution": None, "norm": None},
                      "unsatisfiable", EXIT_NEGATIVE)
    n = sum(abs(v) for v in x)
    return Report({"satisfiable": True, "solution": _vec(x), "norm": str(n)},
                  "solution " + " ".join(map(str, x)))


def cmd_encode_lattice(a) -> Report:
    dim, gens = hilbert.parse_vector_set(_read(a.vecset))
    S = lattice.group_to_linsys(lattice.Lattice(dim, tuple(gens)), budget=a.budget)
    norm, l = linsys.system_norms(S)
    text = linsys.serialize_system(S)
    return Report({"dim": dim, "system": text, "norm": str(norm), "mlcm": str(l)}, text.rstrip("\n"))


def cmd_vreach_system(a) -> Report:
    net, _ = _load_net(a.net)
    S = lattice.virtual_reach_system(net, budget=a.budget)
    norm, l = linsys.system_norms(S)
    text = linsys.serialize_system(S)
    return Report({"dim": S.dim, "system": text, "norm": str(norm), "mlcm": str(l)}, text.rstrip("\n"))


def cmd_pns_build(a) -> Report:
    net, markings = _load_net(a.net)
    x = _marking(markings, a.scc_from, net)
    g = reach.reachability_graph(net, x, a.node_budget)
    sccs = reach.bottom_sccs(g)
    if not 0 <= a.scc_index < len(sccs):
        raise InputError(f"R({a.scc_from}) has {len(sccs)} bottom SCCs; "
                         f"--scc-index {a.scc_index} is out of range")
    G = pns.build_pns(net, sccs[a.scc_index], _index_set(a.I), node_budget=a.node_budget)
    data = pns.pns_to_json(G)
    text = (f"PNS over I={{{','.join(str(i) for i in data['I'])}}} "
            f"J={{{','.join(str(j) for j in data['J'])}}}: {len(G.states)} states, "
            f"{len(G.edges)} edges, proper={pns.is_proper(G)}, reversible={G.reversible}")
    return Report(data, text)


def cmd_simple_cycles(a) -> Report:
    G = pns.pns_from_json(_read(a.pns))
    A_sc = pns.simple_cycle_net(G, a.budget)
    text = serialize_net(A_sc)
    return Report({"net": text, "displacements": [_vec(d) for d in A_sc.deltas()],
                   "norm_bound": str(max((x.norm for x in G.base.actions), default=0) * len(G.states))},
                  text.rstrip("\n"))


def cmd_reduce(a) -> Report:
    P = reductions.parse_presentation(_read(a.presentation))
    chain = reductions.run_chain(P, a.stage)
    inst = chain[a.stage]
    if a.stage == "sl":
        header = [f"stage sl p_init={inst.net.place_names[inst.p_init]} "
                  f"p_cov={inst.net.place_names[inst.p_cov]} "
                  f"p_store={inst.net.place_names[inst.p_store]}"]
    else:
        header = inst.header()
    text = serialize_net(inst.net, header=header)
    data = {"stage": a.stage, "net": text, "places": inst.net.dim, "actions": len(inst.net.actions)}
    return Report(data, text.rstrip("\n"))


def _parse_kv(items, what) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"{what} {item!r} must look like name=value")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def cmd_bounds(a) -> Report:
    params = {}
    for k, v in _parse_kv(a.param, "parameter").items():
        try:
            params[k] = int(v)
        except ValueError:
            raise InputError(f"parameter {k}: expected an integer, got {v!r}") from None
    plugins = {}
    for k, v in _parse_kv(a.plugin, "plugin").items():
        table = EXPONENT_PLUGINS if k == "p" else RB_PLUGINS
        if v not in table:
            raise InputError(f"plugin {k}: unknown builtin {v!r}; choose from {', '.join(table)}")
        plugins[k] = table[v]
    value = bounds.eval_bound(a.id, params, plugins)
    if isinstance(value, list):
        return Report({"id": a.id, "value": _vec(value)}, " ".join(map(str, value)))
    return Report({"id": a.id, "value": str(value)}, str(value))


# ---------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS,
                        help="report format (default text)")
    p = argparse.ArgumentParser(prog="pnet", parents=[common],
                                description="Exact analysis tools for conservative and reversible Petri nets.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("check", cmd_check, "structural classification with witnesses")
    sp.add_argument("net")
    for name, func, help_text in (("live", cmd_live, "liveness of a named marking"),
                                  ("reach-graph", cmd_reach_graph, "reachability graph (DOT in text mode)")):
        sp = add(name, func, help_text)
        sp.add_argument("net")
        sp.add_argument("--marking", required=True)
        sp.add_argument("--node-budget", type=_positive, default=reach.DEFAULT_NODE_BUDGET)
    sp = add("structural-live", cmd_structural_live, "search for a live marking by weight")
    sp.add_argument("net")
    sp.add_argument("--weight-budget", type=_positive, default=reach.DEFAULT_WEIGHT_BUDGET)
    sp.add_argument("--node-budget", type=_positive, default=reach.DEFAULT_NODE_BUDGET)
    sp = add("hilbert", cmd_hilbert, "Hilbert basis of Bx = 0")
    sp.add_argument("matrix")
    sp.add_argument("--budget", type=_positive, default=hilbert.DEFAULT_FRONTIER_BUDGET)
    for name, geq in (("minsol-eq", False), ("minsol-geq", True)):
        sp = add(name, (lambda a, g=geq: _minsol(a, g)),
                 f"minimal solutions of Cy {'>=' if geq else '='} c")
        sp.add_argument("matrix")
        sp.add_argument("rhs", help="file or inline list such as 1,0,2")
        sp.add_argument("--budget", type=_positive, default=hilbert.DEFAULT_FRONTIER_BUDGET)
    sp = add("min-sleq", cmd_min_sleq, "sign-order minimal elements of the monoid generated by a vector set")
    sp.add_argument("vecset")
    sp.add_argument("--budget", type=_positive, default=hilbert.DEFAULT_FRONTIER_BUDGET)
    sp = add("solve", cmd_solve, "least-norm solution of a linear system")
    sp.add_argument("system")
    sp.add_argument("--budget", type=_positive, default=hilbert.DEFAULT_FRONTIER_BUDGET)
    sp = add("encode-lattice", cmd_encode_lattice, "linear system for a generated group")
    sp.add_argument("vecset")
    sp.add_argument("--budget", type=_positive, default=lattice.DEFAULT_RESIDUE_BUDGET)
    sp = add("vreach-system", cmd_vreach_system, "virtual reachability system of a reversible net")
    sp.add_argument("net")
    sp.add_argument("--budget", type=_positive, default=lattice.DEFAULT_RESIDUE_BUDGET)
    sp = add("pns-build", cmd_pns_build, "net with states from a bottom SCC")
    sp.add_argument("net")
    sp.add_argument("--scc-from", required=True, help="marking whose reachability set holds the SCC")
    sp.add_argument("--scc-index", type=int, default=0)
    sp.add_argument("--I", required=True, help="1-based component list such as 1,2,3,4")
    sp.add_argument("--node-budget", type=_positive, default=reach.DEFAULT_NODE_BUDGET)
    sp = add("simple-cycles", cmd_simple_cycles, "simple-cycle net of a PNS (JSON input)")
    sp.add_argument("pns")
    sp.add_argument("--budget", type=_positive, default=pns.DEFAULT_CYCLE_BUDGET)
    sp = add("reduce", cmd_reduce, "run the hardness chain on a presentation")
    sp.add_argument("stage", choices=reductions.STAGES)
    sp.add_argument("presentation")
    sp = add("bounds", cmd_bounds, "evaluate a bound formula")
    sp.add_argument("id", choices=bounds.BOUND_IDS)
    sp.add_argument("--param", action="append", metavar="NAME=VALUE")
    sp.add_argument("--plugin", action="append", metavar="NAME=BUILTIN",
                    help=f"builtins: {', '.join(RB_PLUGINS)}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    mode = getattr(args, "output", "text")
    try:
        rep = args.func(args)
    except BudgetExceeded as e:
        print(f"pnet: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as e:
        print(f"pnet: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PnetError as e:
        print(f"pnet: {e}", file=sys.stderr)
        return EXIT_INPUT
    if mode == "json":
        print(json.dumps(rep.data, indent=2, sort_keys=True))
    else:
        print(rep.text)
    return rep.code


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point that also maps argparse's own exits to the documented codes."""
    try:
        return main(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
