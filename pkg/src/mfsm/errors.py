"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code, see :mod:`mfsm.cli`.
"""

__all__ = [
    "MfsmError",
    "ParameterError",
    "DomainError",
    "InputError",
    "UnsupportedKindError",
    "ResourceCapError",
    "NumericalError",
]


class MfsmError(Exception):
    """Base class for all package errors."""


class ParameterError(MfsmError, ValueError):
    """A scalar argument is outside its admissible range."""


class DomainError(MfsmError, ValueError):
    """Structured inputs (grids, windows, jump sets) violate a contract."""


class InputError(MfsmError, ValueError):
    """Estimator input does not meet the method's preconditions."""


class UnsupportedKindError(MfsmError, ValueError):
    """Operation not defined for this Hurst-function kind."""


class ResourceCapError(MfsmError, RuntimeError):
    """A simulation would exceed the configured atom/work budget."""


class NumericalError(MfsmError, RuntimeError):
    """Quadrature or another numeric routine failed to reach tolerance."""

    def __init__(self, message: str, achieved_tol: float | None = None):
        super().__init__(message)
        self.achieved_tol = achieved_tol
