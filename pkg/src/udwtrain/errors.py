"""Exception types raised across the package."""


class UdwTrainError(Exception):
    """Base class for all package errors."""


class NumericFailure(UdwTrainError, ArithmeticError):
    """A quadrature or series could not reach the requested tolerance."""


class DomainError(UdwTrainError, ValueError):
    """An argument lies outside the supported domain."""


class ReferenceTooCoarse(UdwTrainError):
    """The exact reference is not accurate enough to resolve the measured errors."""


class InsufficientPoints(UdwTrainError, ValueError):
    """Too few usable points for a slope fit."""


class CellBudgetExceeded(UdwTrainError):
    """A Riemann-Stieltjes partition has more cells than the budget allows."""
