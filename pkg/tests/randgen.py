"""Seeded random instance generators shared by the suites."""

from __future__ import annotations

import random

from pnet.linsys import And, LinearSystem, Not, Or, eq, geq, mod
from pnet.net import Action, Net


def random_matrix(rng: random.Random, m: int, n: int, lo: int, hi: int):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def random_atom(rng: random.Random, d: int, norm: int, max_mod: int):
    kind = rng.choice(("eq", "geq", "geq", "mod"))
    coeffs = [rng.randint(-norm, norm) for _ in range(d)]
    if kind == "mod":
        m = rng.randint(2, max_mod)
        return mod(coeffs, rng.randint(0, m - 1), m)
    c = rng.randint(-norm, norm)
    return eq(coeffs, c) if kind == "eq" else geq(coeffs, c)


def random_formula(rng: random.Random, d: int, norm: int, max_mod: int, depth: int = 2):
    if depth == 0 or rng.random() < 0.3:
        atom = random_atom(rng, d, norm, max_mod)
        return Not(atom) if rng.random() < 0.15 else atom
    kids = tuple(random_formula(rng, d, norm, max_mod, depth - 1)
                 for _ in range(rng.randint(2, 3)))
    return And(kids) if rng.random() < 0.6 else Or(kids)


def random_system(rng: random.Random, d: int, norm: int = 4, max_mod: int = 4) -> LinearSystem:
    return LinearSystem(d, random_formula(rng, d, norm, max_mod))


def random_net(rng: random.Random, d: int, k: int, hi: int = 2, name: str = "R") -> Net:
    acts = []
    for i in range(k):
        pre = tuple(rng.randint(0, hi) for _ in range(d))
        post = tuple(rng.randint(0, hi) for _ in range(d))
        acts.append(Action(f"t{i}", pre, post))
    return Net(d, tuple(acts), name)


def random_generators(rng: random.Random, d: int, norm: int):
    k = rng.randint(1, 3)
    return [tuple(rng.randint(-norm, norm) for _ in range(d)) for _ in range(k)]
