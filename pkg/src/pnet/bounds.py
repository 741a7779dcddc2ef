"""Exact evaluation of the explicit bound formulas and recurrences.

Every bound check elsewhere in the package calls :func:`eval_bound`, so each
formula lives in exactly one place.  Formulas that depend on externally
supplied RB-functions take plugins, which must satisfy m <= f(m, d) on the
arguments they are called with.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Mapping, Sequence

from .errors import InputError

Plugin = Callable[[int, int], int]


class PluginError(InputError):
    pass


def checked_plugin(name: str, f: Plugin) -> Plugin:
    """Wrap f so every call enforces the m <= f(m, d) convention."""

    def wrapped(m: int, d: int) -> int:
        v = f(m, d)
        if not isinstance(v, int) or v < m:
            raise PluginError(f"plugin {name} violates m <= f(m,d) at m={m}, d={d}: got {v!r}")
        return v

    wrapped.__name__ = name
    return wrapped


def pottier(l1_norm: int, r: int) -> int:
    return (1 + l1_norm) ** r


def lemma3(d: int, norm: int) -> int:
    return d * (2 + (1 + 2 * norm) ** d * norm) ** d


def lemma4(c_l1: int, d: int, norm: int, r: int) -> int:
    return c_l1 * (2 + d * norm) ** r


def lemma5(d: int, s: int, r: int) -> int:
    # s = max{‖C‖, ‖c‖}
    return (2 + d * s) ** (2 * r + 1)


def lemma6(d: int, norm: int) -> int:
    return (2 + d + d * norm) ** (2 * d + 1)


def theorem2(mlcm: int, d: int, norm: int) -> int:
    return mlcm * (d + (2 + d + d * d * norm) ** (2 * d + 1))


def theorem3(d: int, norm: int) -> int:
    return factorial(d) * norm ** d


def f_scc(m: int, d: int) -> int:
    return m * (1 + m) ** d


def rackoff_g(m: int, d: int) -> list[int]:
    """The sequence g(m,0), ..., g(m,d)."""
    g = [0]
    for i in range(d):
        g.append((m + m * g[i]) ** (i + 1) + g[i])
    return g


def f_dead(m: int, d: int) -> int:
    return m + m * rackoff_g(m, d)[d]


def lambda_extract(m: int, d: int, f: Plugin) -> list[int]:
    """λ_1..λ_d with λ_1 = f(m,d) and λ_{i+1} = f(λ_i,d) + m·i·λ_i^i."""
    if d == 0:
        return []
    lam = [f(m, d)]
    for i in range(1, d):
        lam.append(f(lam[-1], d) + m * i * lam[-1] ** i)
    return lam


def lambda_s37(norm_a: int, d: int, norm_g: int, c_vr: int, n: int,
               f1: Plugin, f_vr: Plugin) -> list[int]:
    """λ_1..λ_n of the large-counter extractor, starting from λ_0 = 0."""
    base = max(f_dead(norm_a, d), c_vr)
    a, b = f1(norm_g, d), f_vr(norm_g, d)
    lam, prev = [], 0
    for _ in range(n):
        prev = base + norm_a * (a + b * prev)
        lam.append(prev)
    return lam


def b0(lambda_j: int, min_sleq_norm: int) -> int:
    return lambda_j + min_sleq_norm


def rb_envelope(c: int, m: int, d: int, p: Callable[[int], int]) -> int:
    return (c + m) ** (2 ** p(d))


def check_m_adapted(lam: Sequence[int], m: int) -> bool:
    """λ_{i+1} >= λ_i + m·λ_i^i for i = 0..d-1, with λ_0 = 1 prepended."""
    seq = [1, *lam]
    return all(seq[i + 1] >= seq[i] + m * seq[i] ** i for i in range(len(lam)))


# ------------------------------------------------------------- dispatch table

_PARAMS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "pottier": (("l1", "r"), ()),
    "lemma3": (("d", "norm"), ()),
    "lemma4": (("c_l1", "d", "norm", "r"), ()),
    "lemma5": (("d", "s", "r"), ()),
    "lemma6": (("d", "norm"), ()),
    "theorem2": (("mlcm", "d", "norm"), ()),
    "theorem3": (("d", "norm"), ()),
    "f_scc": (("m", "d"), ()),
    "rackoff_g": (("m", "d"), ()),
    "f_dead": (("m", "d"), ()),
    "lambda_extract": (("m", "d"), ("f",)),
    "lambda_s37": (("norm_a", "d", "norm_g", "c_vr", "n"), ("f1", "f_vr")),
    "b0": (("lambda_j", "min_sleq_norm"), ()),
    "rb_envelope": (("c", "m", "d"), ("p",)),
}

_FUNCS = {
    "pottier": pottier, "lemma3": lemma3, "lemma4": lemma4, "lemma5": lemma5,
    "lemma6": lemma6, "theorem2": theorem2, "theorem3": theorem3, "f_scc": f_scc,
    "rackoff_g": rackoff_g, "f_dead": f_dead, "lambda_extract": lambda_extract,
    "lambda_s37": lambda_s37, "b0": b0, "rb_envelope": rb_envelope,
}

BOUND_IDS = tuple(_PARAMS)


@dataclass(frozen=True)
class BoundFormula:
    id: str
    params: Mapping[str, int] = field(default_factory=dict)
    plugins: Mapping[str, Callable] = field(default_factory=dict)


def required_params(bound_id: str) -> tuple[str, ...]:
    if bound_id not in _PARAMS:
        raise InputError(f"unknown bound id {bound_id!r}")
    return _PARAMS[bound_id][0]


def eval_bound(f: BoundFormula | str, params: Mapping[str, int] | None = None,
               plugins: Mapping[str, Callable] | None = None):
    """Evaluate a bound exactly; recurrences return their full sequence."""
    if isinstance(f, str):
        f = BoundFormula(f, dict(params or {}), dict(plugins or {}))
    if f.id not in _PARAMS:
        raise InputError(f"unknown bound id {f.id!r}")
    pnames, plug_names = _PARAMS[f.id]
    args = []
    for p in pnames:
        if p not in f.params:
            raise InputError(f"bound {f.id}: missing parameter {p}")
        v = f.params[p]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise InputError(f"bound {f.id}: parameter {p} must be a nonnegative integer")
        args.append(v)
    extra = set(f.params) - set(pnames)
    if extra:
        raise InputError(f"bound {f.id}: unexpected parameter {sorted(extra)[0]}")
    for p in plug_names:
        if p not in f.plugins:
            raise InputError(f"bound {f.id}: missing plugin {p}")
        plug = f.plugins[p]
        # p maps d alone to an exponent and is not an RB-function
        args.append(plug if p == "p" else checked_plugin(p, plug))
    return _FUNCS[f.id](*args)
