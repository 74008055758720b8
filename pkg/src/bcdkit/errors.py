"""Exception types shared across the toolkit."""


class BcdError(Exception):
    """Base class for all toolkit errors."""


class ParseError(BcdError):
    """Input is not well-formed DIMACS CNF."""


class InternalError(BcdError):
    """A caller violated an internal contract (bad id, bad precondition)."""


class InputError(BcdError):
    """A public operation was called with arguments violating its contract."""


class ConflictDetected(BcdError):
    """Unit propagation derived the empty clause; the formula is unsatisfiable."""

    def __init__(self, message, trail=None):
        super().__init__(message)
        self.trail = list(trail or [])


class PostconditionViolation(BcdError):
    """An algorithm could not meet its stated postcondition."""


class TooLarge(BcdError):
    """Input exceeds an oracle's enumeration bound."""


class TimeoutExceeded(BcdError):
    """A cooperative deadline expired mid-run."""
