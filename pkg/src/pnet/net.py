"""Petri net value types, firing semantics and the line-based net text format.

Component indices are 0-based in this API and 1-based in every text format
and report.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InputError, StructuralError

Vector = tuple[int, ...]
Marking = tuple[int, ...]

_IDENT = re.compile(r"^[^\s#]+$")


def as_vector(values: Iterable[int]) -> Vector:
    out = tuple(values)
    for v in out:
        if isinstance(v, bool) or not isinstance(v, int):
            raise StructuralError(f"vector entries must be integers, got {v!r}")
    return out


def as_marking(values: Iterable[int], dim: Optional[int] = None) -> Marking:
    """Validate a marking: nonnegative integers, optionally of a fixed length."""
    x = as_vector(values)
    if dim is not None and len(x) != dim:
        raise StructuralError(f"marking has length {len(x)}, expected {dim}")
    if any(v < 0 for v in x):
        raise StructuralError(f"marking has a negative entry: {x}")
    return x


def vnorm(v: Sequence[int]) -> int:
    """Max-norm; 0 for the empty vector."""
    return max((abs(e) for e in v), default=0)


def l1(v: Sequence[int]) -> int:
    return sum(abs(e) for e in v)


def vadd(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def leq(u: Sequence[int], v: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(u, v))


@dataclass(frozen=True)
class Action:
    name: str
    consume: Vector
    produce: Vector

    def __post_init__(self):
        object.__setattr__(self, "consume", as_marking(self.consume))
        object.__setattr__(self, "produce", as_marking(self.produce))
        if len(self.consume) != len(self.produce):
            raise StructuralError(f"action {self.name}: consume/produce lengths differ")

    @property
    def delta(self) -> Vector:
        return vsub(self.produce, self.consume)

    @property
    def norm(self) -> int:
        return max(vnorm(self.consume), vnorm(self.produce))

    def reverse(self, name: Optional[str] = None) -> "Action":
        return Action(name or self.name + "^R", self.produce, self.consume)


@dataclass(frozen=True)
class Net:
    dim: int
    actions: tuple[Action, ...]
    name: str = "net"
    place_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 0:
            raise StructuralError(f"net dimension must be a nonnegative integer, got {self.dim!r}")
        object.__setattr__(self, "actions", tuple(self.actions))
        seen = set()
        for a in self.actions:
            if len(a.consume) != self.dim:
                raise StructuralError(
                    f"action {a.name} has length {len(a.consume)}, net dimension is {self.dim}")
            if a.name in seen:
                raise StructuralError(f"duplicate action name {a.name}")
            seen.add(a.name)
        if self.place_names is not None:
            names = tuple(self.place_names)
            if len(names) != self.dim or len(set(names)) != self.dim:
                raise StructuralError("place names must be unique and one per place")
            object.__setattr__(self, "place_names", names)

    def __len__(self):
        return len(self.actions)

    def action_index(self, name: str) -> int:
        for i, a in enumerate(self.actions):
            if a.name == name:
                return i
        raise StructuralError(f"unknown action {name!r}")

    def place_index(self, name: str) -> int:
        if self.place_names is None or name not in self.place_names:
            raise StructuralError(f"unknown place {name!r}")
        return self.place_names.index(name)

    def deltas(self) -> list[Vector]:
        return [a.delta for a in self.actions]


def _check_marking(net: Net, x: Sequence[int]) -> None:
    if len(x) != net.dim:
        raise StructuralError(f"marking has length {len(x)}, net dimension is {net.dim}")


def _check_index(net: Net, a: int) -> None:
    if not isinstance(a, int) or not 0 <= a < len(net.actions):
        raise StructuralError(f"action index {a!r} out of range")


def step(net: Net, x: Sequence[int], a: int) -> Optional[Marking]:
    """Fire action a at x; None when a is not enabled."""
    _check_marking(net, x)
    _check_index(net, a)
    act = net.actions[a]
    if not leq(act.consume, x):
        return None
    return tuple(v - c + p for v, c, p in zip(x, act.consume, act.produce))


def run(net: Net, x: Sequence[int], seq: Sequence[int]) -> Optional[Marking]:
    y: Optional[Marking] = tuple(x)
    for a in seq:
        y = step(net, y, a)
        if y is None:
            return None
    return y


def displacement_of_sequence(net: Net, seq: Sequence[int]) -> Vector:
    total = [0] * net.dim
    for a in seq:
        _check_index(net, a)
        for i, v in enumerate(net.actions[a].delta):
            total[i] += v
    return tuple(total)


def restrict_net(net: Net, indices: Iterable[int]) -> Net:
    """Keep only the given components (any order in, ascending order out)."""
    idx = sorted(set(indices))
    for i in idx:
        if not 0 <= i < net.dim:
            raise StructuralError(f"component index {i + 1} outside [1,{net.dim}]")
    actions = tuple(
        Action(a.name, tuple(a.consume[i] for i in idx), tuple(a.produce[i] for i in idx))
        for a in net.actions)
    names = None if net.place_names is None else tuple(net.place_names[i] for i in idx)
    return Net(len(idx), actions, net.name, names)


def net_norm(net: Net) -> int:
    return max((a.norm for a in net.actions), default=0)


def enabled_actions(net: Net, x: Sequence[int]) -> set[int]:
    _check_marking(net, x)
    return {i for i, a in enumerate(net.actions) if leq(a.consume, x)}


# ---------------------------------------------------------------- text format

@dataclass
class NetDocument:
    """A parsed net file: the net plus its named markings in file order."""
    net: Net
    markings: dict[str, Marking] = field(default_factory=dict)


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not re.fullmatch(r"[+-]?\d+", t))
        raise InputError(f"line {lineno}: expected an integer, got {bad!r}") from None


def parse_net(text: str) -> NetDocument:
    """Parse the net text format.

    Besides the four documented directives an optional ``names`` line may
    list one identifier per place; transformed nets use it for audit names.
    """
    name = "net"
    dim: Optional[int] = None
    names: Optional[tuple[str, ...]] = None
    actions: list[Action] = []
    markings: dict[str, Marking] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0]
        if kw == "net":
            if len(tok) != 2:
                raise InputError(f"line {lineno}: expected 'net <name>'")
            name = tok[1]
        elif kw == "places":
            if len(tok) != 2:
                raise InputError(f"line {lineno}: expected 'places <d>'")
            dim = _ints(tok[1:], lineno)[0]
            if dim < 0:
                raise InputError(f"line {lineno}: negative place count {dim}")
        elif kw == "names":
            names = tuple(tok[1:])
        elif kw in ("action", "marking"):
            if dim is None:
                raise InputError(f"line {lineno}: '{kw}' before 'places'")
            if len(tok) < 2:
                raise InputError(f"line {lineno}: '{kw}' needs a name")
            if kw == "action":
                body = tok[2:]
                if body.count("->") != 1:
                    raise InputError(f"line {lineno}: action needs exactly one '->'")
                k = body.index("->")
                cons, prod = _ints(body[:k], lineno), _ints(body[k + 1:], lineno)
                if len(cons) != dim or len(prod) != dim:
                    raise InputError(
                        f"line {lineno}: action {tok[1]} needs {dim} entries per side")
                if any(v < 0 for v in cons + prod):
                    raise InputError(f"line {lineno}: negative entry in action {tok[1]}")
                if any(a.name == tok[1] for a in actions):
                    raise InputError(f"line {lineno}: duplicate action name {tok[1]}")
                actions.append(Action(tok[1], tuple(cons), tuple(prod)))
            else:
                vals = _ints(tok[2:], lineno)
                if len(vals) != dim:
                    raise InputError(f"line {lineno}: marking {tok[1]} needs {dim} entries")
                if any(v < 0 for v in vals):
                    raise InputError(f"line {lineno}: negative entry in marking {tok[1]}")
                if tok[1] in markings:
                    raise InputError(f"line {lineno}: duplicate marking name {tok[1]}")
                markings[tok[1]] = tuple(vals)
        else:
            raise InputError(f"line {lineno}: unknown directive {kw!r}")
    if dim is None:
        raise InputError("missing 'places <d>' line")
    try:
        net = Net(dim, tuple(actions), name, names)
    except StructuralError as e:
        raise InputError(str(e)) from None
    return NetDocument(net, markings)


def serialize_net(net: Net, markings: Optional[dict[str, Sequence[int]]] = None,
                  header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append(f"net {net.name}")
    lines.append(f"places {net.dim}")
    if net.place_names is not None:
        lines.append("names " + " ".join(net.place_names))
    for a in net.actions:
        lines.append(" ".join(["action", a.name, *map(str, a.consume), "->", *map(str, a.produce)]))
    for mname, x in (markings or {}).items():
        lines.append(" ".join(["marking", mname, *map(str, x)]))
    return "\n".join(lines) + "\n"
