import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from pnet.errors import BudgetExceeded, InputError, StructuralError
from pnet.lattice import (Lattice, group_to_linsys, hnf, lattice_member, residue_set,
                          virtual_reach, virtual_reach_system)
from pnet.linsys import TRUE, evaluate, system_norms
from pnet.net import Action, Net
from randgen import random_generators


def test_hnf_of_a_simple_lattice():
    h = hnf([[2, 0], [0, 3]])
    assert h.rank == 2 and h.det == 6
    assert Lattice(2, ((2, 0), (0, 3))).hnf().det == 6


def test_membership_examples():
    L = Lattice(2, ((2, 0), (0, 3)))
    assert lattice_member(L, (4, -3)) and not lattice_member(L, (1, 0))
    assert lattice_member(L, (4, -3), residue=True)
    D = Lattice(3, ((1, 1, 0),))
    assert lattice_member(D, (-2, -2, 0)) and not lattice_member(D, (1, 0, 0))
    with pytest.raises(InputError):
        lattice_member(L, (1,))
    with pytest.raises(InputError):
        Lattice(2, ((1,),))


def test_residue_set_and_budget():
    h = Lattice(2, ((2, 1), (0, 3))).hnf()
    B = residue_set(h)
    assert all(0 <= v < h.det for b in B for v in b)
    with pytest.raises(BudgetExceeded):
        residue_set(Lattice(3, ((50, 0, 0), (0, 50, 0), (0, 0, 50))).hnf(), budget=10)


def test_trivial_groups():
    assert group_to_linsys(Lattice(2, ())).formula != TRUE
    assert group_to_linsys(Lattice(2, ((1, 0), (0, 1)))).formula == TRUE


def test_x23_encoding():
    S = group_to_linsys(Lattice(2, ((2, 0), (0, 3))))
    assert system_norms(S)[1] == 6
    for x in range(-7, 8):
        for y in range(-7, 8):
            assert evaluate(S, (x, y)) == (x % 2 == 0 and y % 3 == 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_membership_matches_group_oracle(seed, d):
    X = random_generators(random.Random(seed), d, 3)
    L = Lattice(d, tuple(X))
    grid = O.group_members(X, d, 5)
    S = group_to_linsys(L)
    for idx in np.ndindex(*grid.shape):
        y = tuple(i - 5 for i in idx)
        want = bool(grid[idx])
        assert lattice_member(L, y) == want
        assert lattice_member(L, y, residue=True) == want
        assert evaluate(S, y) == want


def test_virtual_reach_a1(a1):
    S = virtual_reach_system(a1)
    x0 = (1, 0, 1, 0, 2)
    assert evaluate(S, x0 + (0, 1, 2, 0, 1))
    assert not evaluate(S, x0 + (0, 0, 0, 0, 0))
    assert virtual_reach(a1, x0, (0, 1, 2, 0, 1))
    assert not virtual_reach(a1, x0, (1, 0, 1, 0, 1))


def test_virtual_reach_needs_reversible_net_for_the_system():
    grow = Net(1, (Action("g", (0,), (1,)),))
    with pytest.raises(StructuralError):
        virtual_reach_system(grow)
    # the monoid question is still answered for irreversible nets
    assert virtual_reach(grow, (0,), (3,))
    assert not virtual_reach(grow, (3,), (0,))
    assert virtual_reach(Net(1, ()), (2,), (2,))
