"""Exception hierarchy shared by every module of the package."""


class GameError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(GameError, ValueError):
    """Malformed input: bad dimensions, out-of-range parameters, schema violations."""


class DomainError(GameError, ValueError):
    """Inputs are well formed but the requested quantity is undefined for them."""


class StateError(GameError, RuntimeError):
    """Operation called in a regime where it does not apply (e.g. wrong equilibrium case)."""


class ResourceError(GameError, RuntimeError):
    """Exact enumeration requested beyond the configured size limit."""
