"""Exception hierarchy shared by every ncsat module."""


class NcsError(Exception):
    """Base class for all errors raised by ncsat."""


class InputError(NcsError, ValueError):
    """Malformed or inconsistent input data."""


class ModelError(NcsError, ValueError):
    """A sorting model violates its structural invariants."""


class ParseError(NcsError, ValueError):
    """Text in a supported file format could not be parsed."""


class BridgeError(NcsError, RuntimeError):
    """An external solver failed, or its answer could not be trusted."""


class BudgetExceeded(NcsError, RuntimeError):
    """The solver ran out of its conflict or time budget (not an UNSAT answer)."""


class DecodeError(NcsError, ValueError):
    """A solver solution is partial or infeasible and cannot be decoded."""


class FaithfulnessError(NcsError, RuntimeError):
    """A decoded model does not extend the learning set it was decoded from."""
