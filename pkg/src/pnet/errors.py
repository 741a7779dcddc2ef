"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class PnetError(Exception):
    """Base class for library errors."""


class InputError(PnetError, ValueError):
    """Malformed input or violated precondition (CLI exit code 2)."""


class StructuralError(InputError):
    """Dimension mismatch, bad index, or an invalid net."""


class MembershipError(InputError):
    """A vector is not in the lattice an operation requires it to be in."""


class BudgetExceeded(PnetError):
    """An explicit exploration budget ran out (CLI exit code 3)."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class StateSpaceOverflow(BudgetExceeded):
    """Reachability exploration discovered more markings than allowed."""
