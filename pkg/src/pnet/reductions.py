"""Hardness gadgets: commutative-semigroup coverability down to structural
liveness of ordinary reversible population-protocol nets.

Chain of stages, each a net-to-net transformer:

    presentation -> Cover -> SCover (store places) -> PPSCover -> SL

Every stage re-checks the structural class it promises with the classifier.
Place indices are 0-based throughout.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import InputError, StateSpaceOverflow, StructuralError
from .net import Action, Marking, Net, displacement_of_sequence, leq
from .reach import is_live
from .structural import is_one_conservative, is_ordinary, is_pp_net, is_strongly_reversible

STAGES = ("cover", "scover", "ppscover", "sl")


@dataclass(frozen=True)
class SemigroupPresentation:
    alphabet: tuple[str, ...]
    equations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    u0: str
    v0: str

    def __post_init__(self):
        letters = set(self.alphabet)
        if len(letters) != len(self.alphabet):
            raise InputError("alphabet lists a letter twice")
        for u, v in self.equations:
            for w in (u, v):
                for c in w:
                    if c not in letters:
                        raise InputError(f"letter {c!r} is not in the alphabet")
        for c in (self.u0, self.v0):
            if c not in letters:
                raise InputError(f"letter {c!r} is not in the alphabet")

    @property
    def normalized(self) -> bool:
        return all(len(set(w)) == len(w) for eqn in self.equations for w in eqn)


def parse_presentation(text: str) -> SemigroupPresentation:
    """Lines 'letters a b c', 'eq a = b c', 'ask a covers b'; '#' starts a comment."""
    alphabet: Optional[tuple[str, ...]] = None
    eqs = []
    ask = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "letters":
            alphabet = tuple(tok[1:])
        elif tok[0] == "eq":
            if tok.count("=") != 1:
                raise InputError(f"line {lineno}: equation needs exactly one '='")
            k = tok.index("=")
            eqs.append((tuple(tok[1:k]), tuple(tok[k + 1:])))
        elif tok[0] == "ask":
            if len(tok) != 4 or tok[2] != "covers":
                raise InputError(f"line {lineno}: expected 'ask <letter> covers <letter>'")
            ask = (tok[1], tok[3])
        else:
            raise InputError(f"line {lineno}: unknown directive {tok[0]!r}")
    if alphabet is None:
        raise InputError("missing 'letters' line")
    if ask is None:
        raise InputError("missing 'ask' line")
    try:
        return SemigroupPresentation(alphabet, tuple(eqs), *ask)
    except InputError as e:
        raise InputError(f"presentation: {e}") from None


def serialize_presentation(P: SemigroupPresentation) -> str:
    lines = ["letters " + " ".join(P.alphabet)]
    for u, v in P.equations:
        lines.append(" ".join(["eq", *u, "=", *v]))
    lines.append(f"ask {P.u0} covers {P.v0}")
    return "\n".join(lines) + "\n"


def normalize(P: SemigroupPresentation) -> SemigroupPresentation:
    """Split repeated letters: a a u = v becomes a_1 a_2 u = v, a_1 = a, a_2 = a."""
    alphabet = list(P.alphabet)
    used = set(alphabet)
    eqs = []
    extra = []

    def fresh(base):
        n = 1
        while f"{base}_{n}" in used:
            n += 1
        name = f"{base}_{n}"
        used.add(name)
        alphabet.append(name)
        return name

    for u, v in P.equations:
        sides = []
        for w in (u, v):
            seen = set()
            out = []
            for c in w:
                if c in seen:
                    c2 = fresh(c)
                    extra.append(((c2,), (c,)))
                    out.append(c2)
                else:
                    seen.add(c)
                    out.append(c)
            sides.append(tuple(out))
        eqs.append(tuple(sides))
    return SemigroupPresentation(tuple(alphabet), tuple(eqs + extra), P.u0, P.v0)


@dataclass(frozen=True)
class CoverInstance:
    """A net with distinguished places; p_store / p_run only in later stages."""
    net: Net
    p_init: int
    p_cov: int
    p_store: Optional[int] = None
    p_run: Optional[int] = None
    stage: str = "cover"

    def header(self) -> list[str]:
        names = self.net.place_names or tuple(str(i + 1) for i in range(self.net.dim))
        parts = [f"stage {self.stage}", f"p_init={names[self.p_init]}",
                 f"p_cov={names[self.p_cov]}"]
        if self.p_store is not None:
            parts.append(f"p_store={names[self.p_store]}")
        if self.p_run is not None:
            parts.append(f"p_run={names[self.p_run]}")
        return [" ".join(parts)]


def _unit(d: int, *idx: int) -> tuple[int, ...]:
    v = [0] * d
    for i in idx:
        v[i] += 1
    return tuple(v)


def _dedupe(actions: Sequence[Action]) -> tuple[Action, ...]:
    seen = set()
    out = []
    for a in actions:
        if (a.consume, a.produce) not in seen:
            seen.add((a.consume, a.produce))
            out.append(a)
    return tuple(out)


def _require(net: Net, *, ordinary=False, strongly_reversible=False,
             one_conservative=False, pp=False) -> None:
    checks = [(ordinary, is_ordinary, "ordinary"),
              (strongly_reversible, is_strongly_reversible, "strongly reversible"),
              (one_conservative, is_one_conservative, "1-conservative"),
              (pp, is_pp_net, "a PP-net")]
    for wanted, test, label in checks:
        if wanted and not test(net):
            raise StructuralError(f"net {net.name} is not {label}")


def semigroup_to_cover(P: SemigroupPresentation) -> CoverInstance:
    """One place per letter; each equation u = v yields (χ_u, χ_v) and its reverse."""
    if not P.normalized:
        raise InputError("presentation repeats a letter within an equation side; "
                         "normalize it first")
    d = len(P.alphabet)
    pos = {c: i for i, c in enumerate(P.alphabet)}
    actions = []
    for k, (u, v) in enumerate(P.equations):
        cu = _unit(d, *(pos[c] for c in u))
        cv = _unit(d, *(pos[c] for c in v))
        actions.append(Action(f"e{k}", cu, cv))
        actions.append(Action(f"e{k}R", cv, cu))
    net = Net(d, _dedupe(actions), "cover", P.alphabet)
    inst = CoverInstance(net, pos[P.u0], pos[P.v0])
    _require(net, ordinary=True, strongly_reversible=True)
    return inst


def cover_to_scover(inst: CoverInstance) -> CoverInstance:
    """Double the dimension with store places that balance every action."""
    net = inst.net
    _require(net, ordinary=True, strongly_reversible=True)
    d = net.dim
    D = 2 * d
    actions = []
    for a in net.actions:
        k = sum(a.consume) - sum(a.produce)
        cons = list(a.consume) + [0] * d
        prod = list(a.produce) + [0] * d
        # surplus tokens go to, deficits come from, the first |k| store places
        side = prod if k >= 0 else cons
        for i in range(abs(k)):
            side[d + i] = 1
        actions.append(Action(a.name, tuple(cons), tuple(prod)))
    moves = [(0, d - 1)] + [(i, i + 1) for i in range(d - 1)]
    for i, j in moves:
        actions.append(Action(f"move:{i + 1}:{j + 1}", _unit(D, d + i), _unit(D, d + j)))
        actions.append(Action(f"move:{j + 1}:{i + 1}", _unit(D, d + j), _unit(D, d + i)))
    names = tuple(net.place_names or (f"p{i + 1}" for i in range(d)))
    names += tuple(f"store:{i + 1}" for i in range(d))
    out = Net(D, _dedupe(actions), "scover", names)
    _require(out, ordinary=True, strongly_reversible=True, one_conservative=True)
    return CoverInstance(out, inst.p_init, inst.p_cov, d, None, "scover")


def _reverse_pairs(net: Net) -> list[tuple[Action, Optional[Action]]]:
    """Pair each action with its reverse; self-reverse actions pair with None."""
    by_body = {}
    for a in net.actions:
        by_body.setdefault((a.consume, a.produce), a)
    done = set()
    pairs = []
    for a in net.actions:
        key = (a.consume, a.produce)
        if key in done:
            continue
        rev = by_body.get((a.produce, a.consume))
        done.add(key)
        done.add((a.produce, a.consume))
        pairs.append((a, None if rev is None or rev is a or a.consume == a.produce else rev))
    return pairs


def conservative_to_pp(inst: CoverInstance) -> CoverInstance:
    """Simulate each k-token action pair by 2k two-token steps through control places."""
    net = inst.net
    _require(net, ordinary=True, strongly_reversible=True, one_conservative=True)
    d = net.dim
    names = list(net.place_names or (f"p{i + 1}" for i in range(d)))
    run = d
    names.append("run")
    specs = []  # (name, consume places, produce places), resolved once the dimension is known
    for a, _ in _reverse_pairs(net):
        ins = [i for i, v in enumerate(a.consume) if v]
        outs = [i for i, v in enumerate(a.produce) if v]
        k = len(ins)
        if k == 0:
            # empty action: keep it as a run self-loop so the pair still has a counterpart
            specs.append((f"{a.name}.1", (run,), (run,)))
            continue
        ctrl = []
        for j in range(1, k):
            ctrl.append(len(names))
            names.append(f"ctrl:{a.name}:{j}")
        chain = [run] + ctrl + [run]
        for j in range(k):
            pre = (ins[j], chain[j])
            post = (outs[j], chain[j + 1])
            specs.append((f"{a.name}.{j + 1}", pre, post))
            specs.append((f"{a.name}.{j + 1}R", post, pre))
    D = len(names)
    actions = [Action(n, _unit(D, *pre), _unit(D, *post)) for n, pre, post in specs]
    out = Net(D, _dedupe(actions), "pp", tuple(names))
    _require(out, ordinary=True, strongly_reversible=True, pp=True)
    return replace(inst, net=out, p_run=run, stage="pp")


def scover_to_ppscover(inst: CoverInstance) -> CoverInstance:
    """PP simulation plus primed entry and exit places around p_init and p_cov."""
    if inst.p_store is None:
        raise InputError("instance has no store place")
    pp = conservative_to_pp(inst)
    net = pp.net
    D = net.dim + 2
    init2, cov2 = net.dim, net.dim + 1
    pad = lambda v: tuple(v) + (0, 0)
    actions = [Action(a.name, pad(a.consume), pad(a.produce)) for a in net.actions]
    s, r = inst.p_store, pp.p_run
    actions += [
        Action("enter", _unit(D, init2, s), _unit(D, inst.p_init, r)),
        Action("enterR", _unit(D, inst.p_init, r), _unit(D, init2, s)),
        Action("leave", _unit(D, inst.p_cov, r), _unit(D, cov2, s)),
        Action("leaveR", _unit(D, cov2, s), _unit(D, inst.p_cov, r)),
    ]
    names = tuple(net.place_names) + ("init'", "cov'")
    out = Net(D, tuple(actions), "ppscover", names)
    _require(out, ordinary=True, strongly_reversible=True, pp=True)
    return CoverInstance(out, init2, cov2, s, r, "ppscover")


@dataclass(frozen=True)
class SlInstance:
    net: Net
    p_init: int
    p_cov: int
    p_store: int
    p_inc: int
    p_dec: int
    p_dec2: int
    source_places: int

    def initial_marking(self, k: int) -> Marking:
        """One token on p_init and k + 1 on p_store."""
        x = [0] * self.net.dim
        x[self.p_init] = 1
        x[self.p_store] += k + 1
        return tuple(x)

    def certificate(self) -> tuple[tuple[str, ...], tuple[int, ...]]:
        """A sequence using every non-reversed gadget action with zero displacement."""
        seq = ("a_cov", "a1", "a3", "a2", "a2", "a3", f"inc:{self.p_cov + 1}")
        idx = [self.net.action_index(n) for n in seq]
        return seq, displacement_of_sequence(self.net, idx)


def ppscover_to_sl(inst: CoverInstance) -> SlInstance:
    """Extend a PPSCover instance to a net that is structurally live iff it is positive."""
    net = inst.net
    _require(net, ordinary=True, strongly_reversible=True, pp=True)
    if inst.p_store is None:
        raise InputError("instance has no store place")
    s, c0, i0 = inst.p_store, inst.p_cov, inst.p_init
    if s in (c0, i0):
        raise InputError("store place must differ from p_init and p_cov")
    d = net.dim
    D = d + 3
    inc, dec, dec2 = d, d + 1, d + 2
    pad = lambda v: tuple(v) + (0, 0, 0)
    actions = [Action(a.name, pad(a.consume), pad(a.produce)) for a in net.actions]
    actions.append(Action("a_cov", _unit(D, c0, s), _unit(D, inc, dec)))
    for p in range(d):
        if p == s:
            continue
        actions.append(Action(f"inc:{p + 1}", _unit(D, inc, s), _unit(D, inc, p)))
        actions.append(Action(f"dec:{p + 1}", _unit(D, dec, p), _unit(D, dec, s)))
    actions += [
        Action("a1", _unit(D, inc), _unit(D, dec)),
        Action("a2", _unit(D, dec), _unit(D, dec2)),
        Action("a2R", _unit(D, dec2), _unit(D, dec)),
        Action("a3", _unit(D, dec, dec2), _unit(D, dec, s)),
        Action("a_init", _unit(D, dec), _unit(D, i0)),
        Action("a_initR", _unit(D, i0), _unit(D, dec)),
    ]
    names = tuple(net.place_names or (f"p{i + 1}" for i in range(d))) + ("inc", "dec", "dec'")
    out = Net(D, tuple(actions), "sl", names)
    _require(out, ordinary=True, pp=True)
    return SlInstance(out, i0, c0, s, inc, dec, dec2, d)


def run_chain(P: SemigroupPresentation, until: str = "sl"):
    """All stage outputs up to `until`, keyed by stage name."""
    if until not in STAGES:
        raise InputError(f"unknown stage {until!r}; expected one of {', '.join(STAGES)}")
    out = {}
    out["cover"] = semigroup_to_cover(normalize(P))
    if until == "cover":
        return out
    out["scover"] = cover_to_scover(out["cover"])
    if until == "scover":
        return out
    out["ppscover"] = scover_to_ppscover(out["scover"])
    if until == "ppscover":
        return out
    out["sl"] = ppscover_to_sl(out["ppscover"])
    return out


# ----------------------------------------------------------------- oracles

def covers(net: Net, x0: Sequence[int], target: Sequence[int],
           node_budget: int = 10 ** 6) -> Optional[bool]:
    """Breadth-first search for a marking >= target; None when the budget runs out."""
    x0 = tuple(x0)
    seen = {x0}
    queue = deque([x0])
    acts = [(a.consume, a.delta) for a in net.actions]
    while queue:
        x = queue.popleft()
        if leq(target, x):
            return True
        for cons, delta in acts:
            if leq(cons, x):
                y = tuple(u + v for u, v in zip(x, delta))
                if y not in seen:
                    if len(seen) >= node_budget:
                        return None
                    seen.add(y)
                    queue.append(y)
    return False


def instance_answer(inst: CoverInstance, store_budget: int = 4,
                    node_budget: int = 10 ** 6) -> Optional[bool]:
    """Bounded coverability answer of a stage instance.

    Cover asks e_init ->* >= e_cov; store variants try e_init + k e_store
    for k <= store_budget.  False means no witness within the budget.
    """
    d = inst.net.dim
    target = _unit(d, inst.p_cov)
    ks = range(store_budget + 1) if inst.p_store is not None else (0,)
    unknown = False
    for k in ks:
        x0 = list(_unit(d, inst.p_init))
        if inst.p_store is not None:
            x0[inst.p_store] += k
        r = covers(inst.net, x0, target, node_budget)
        if r:
            return True
        unknown |= r is None
    return None if unknown else False


def least_live_k(sl: SlInstance, k_max: int, node_budget: int = 10 ** 6) -> Optional[int]:
    """Least k <= k_max with initial_marking(k) live, or None."""
    for k in range(k_max + 1):
        try:
            if is_live(sl.net, sl.initial_marking(k), node_budget):
                return k
        except StateSpaceOverflow:
            return None
    return None
