"""Exception hierarchy shared by all modules."""


class AbwError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AbwError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridMismatch(AbwError, ValueError):
    """Two grid functions that must share a u-grid have different sizes."""


class InvalidMarket(AbwError, ValueError):
    """Market inputs violate a structural invariant (PSD correlation, ...)."""


class IncreasingXiError(InvalidMarket):
    """Growth aggregate below the rate aggregate: the state-price weight
    xi would be strictly increasing, which the solver does not support."""


class Infeasible(AbwError):
    """The constraint set of the requested problem is empty."""


class ConvergenceError(AbwError, RuntimeError):
    """A root bracket could not be established or refined within max_iter."""


class ConfigError(AbwError, ValueError):
    """A run configuration file is malformed or violates a precondition."""
