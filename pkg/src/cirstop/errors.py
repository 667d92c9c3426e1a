"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError
(and subclasses) -> 3, ValidationFailure -> 1.
"""


class CirstopError(Exception):
    """Base class for all package errors."""


class ConfigError(CirstopError):
    """Invalid configuration or parameter set (named inequality in message)."""


class NumericalError(CirstopError):
    """Base class for numerical failures."""


class DomainError(NumericalError):
    """Argument outside the valid domain of an operation."""


class PoleError(NumericalError):
    """Evaluation at (or too close to) a pole of a special function."""


class OverflowSignal(NumericalError):
    """Result magnitude exceeds the representable double range."""


class ConvergenceError(NumericalError):
    """Series or quadrature failed to reach the requested tolerance."""


class BracketError(NumericalError):
    """Root bracketing failed: no sign change, or an ambiguous multiplicity."""


class DependencyError(NumericalError):
    """A required upstream solution (e.g. the selling value) is missing."""


class ValidationFailure(CirstopError):
    """One or more Monte Carlo cross-checks failed."""
