"""Exact analysis of conservative and reversible Petri nets."""

from .errors import BudgetExceeded, InputError, PnetError, StateSpaceOverflow, StructuralError
from .net import Action, Net, parse_net, serialize_net

__all__ = [
    "Action", "BudgetExceeded", "InputError", "Net", "PnetError", "StateSpaceOverflow",
    "StructuralError", "parse_net", "serialize_net",
]
__version__ = "0.1.0"
