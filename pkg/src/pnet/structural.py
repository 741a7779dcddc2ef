"""Structural decision procedures for Petri nets.

Each existential check (conservative, reversible, structurally bounded) is
answered by a Hilbert basis and support covering: a positive solution exists
iff the basis elements together touch every required coordinate, and then
the sum of a covering subfamily is one.  The basis is grown only until the
cover is complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .hilbert import positive_support_solution
from .intlinalg import dot, transpose
from .net import Net, Vector


def conservativeness_witness(net: Net) -> Optional[Vector]:
    """Some w >= 1 with <Δ(a), w> = 0 for all actions, or None."""
    return positive_support_solution(net.deltas(), net.dim)


def is_one_conservative(net: Net) -> bool:
    return all(sum(a.consume) == sum(a.produce) for a in net.actions)


def reversibility_witness(net: Net) -> Optional[Vector]:
    """Multiplicities m >= 1 with sum_a m(a)Δ(a) = 0, or None."""
    k = len(net.actions)
    return positive_support_solution(transpose(net.deltas(), net.dim), k)


def structural_boundedness(net: Net) -> tuple[bool, Optional[Vector]]:
    """Decide whether some w >= 1 has <Δ(a), w> <= 0 for all actions."""
    d, k = net.dim, len(net.actions)
    w = conservativeness_witness(net)
    if w is not None:
        # a conservative weighting is a bounded one with zero slack
        return True, w
    # one slack per action: <Δ(a), w> + s_a = 0
    rows = [list(a.delta) + [1 if j == i else 0 for j in range(k)]
            for i, a in enumerate(net.actions)]
    total = positive_support_solution(rows, d + k, range(d))
    if total is None:
        return False, None
    return True, total[:d]


def is_ordinary(net: Net) -> bool:
    return all(v in (0, 1) for a in net.actions for v in a.consume + a.produce)


def is_pp_net(net: Net) -> bool:
    return all(sum(a.consume) == sum(a.produce) and sum(a.consume) in (1, 2)
               for a in net.actions)


def is_strongly_reversible(net: Net) -> bool:
    bodies = {(a.consume, a.produce) for a in net.actions}
    return all((p, c) in bodies for c, p in bodies)


@dataclass(frozen=True)
class StructuralReport:
    conservative: bool
    conservative_witness: Optional[Vector]
    one_conservative: bool
    structurally_bounded: bool
    bounded_witness: Optional[Vector]
    reversible: bool
    reversible_witness: Optional[Vector]
    ordinary: bool
    pp_net: bool
    strongly_reversible: bool

    def validate(self, net: Net) -> None:
        """Re-check every witness exactly; raises AssertionError on failure."""
        deltas = net.deltas()
        if self.conservative_witness is not None:
            w = self.conservative_witness
            assert all(v >= 1 for v in w) and all(dot(dl, w) == 0 for dl in deltas)
        if self.bounded_witness is not None:
            w = self.bounded_witness
            assert all(v >= 1 for v in w) and all(dot(dl, w) <= 0 for dl in deltas)
        if self.reversible_witness is not None:
            m = self.reversible_witness
            assert all(v >= 1 for v in m)
            assert all(sum(mi * dl[i] for mi, dl in zip(m, deltas)) == 0 for i in range(net.dim))
        assert not self.one_conservative or self.conservative

    def to_json(self) -> dict:
        def vec(v):
            return None if v is None else [str(e) for e in v]
        return {
            "conservative": self.conservative,
            "conservative_witness": vec(self.conservative_witness),
            "one_conservative": self.one_conservative,
            "structurally_bounded": self.structurally_bounded,
            "bounded_witness": vec(self.bounded_witness),
            "reversible": self.reversible,
            "reversible_witness": vec(self.reversible_witness),
            "ordinary": self.ordinary,
            "pp_net": self.pp_net,
            "strongly_reversible": self.strongly_reversible,
        }


def classify(net: Net) -> StructuralReport:
    w = conservativeness_witness(net)
    bounded, bw = structural_boundedness(net)
    m = reversibility_witness(net)
    return StructuralReport(
        conservative=w is not None,
        conservative_witness=w,
        one_conservative=is_one_conservative(net),
        structurally_bounded=bounded,
        bounded_witness=bw,
        reversible=m is not None,
        reversible_witness=m,
        ordinary=is_ordinary(net),
        pp_net=is_pp_net(net),
        strongly_reversible=is_strongly_reversible(net),
    )
