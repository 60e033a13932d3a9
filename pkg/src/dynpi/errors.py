"""Exception hierarchy shared by every stage of the miner."""


class DpiError(Exception):
    """Base class for errors raised by this package."""


class InputError(DpiError, ValueError):
    """A caller passed an argument that violates an operation's precondition."""


class AbstractionDomainError(DpiError):
    """A heap or object graph left the acyclic domain the abstraction requires."""


class InternalError(DpiError, RuntimeError):
    """An internal invariant was violated (e.g. a replay diverged)."""
