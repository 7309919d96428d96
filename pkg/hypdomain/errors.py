"""
Exception hierarchy for hypdomain.
"""
from typing import List, Optional


class HypDomainError(Exception):
    """Base class for every error raised by the library."""


class DomainError(HypDomainError, ValueError):
    """Invalid domain data or an operation outside a domain's preconditions."""


class DimensionError(DomainError):
    """Vector or functional length does not match the ambient dimension."""


class NotInteriorError(DomainError):
    """A point that must be interior is on the boundary or outside."""


class OutsideClosureError(DomainError):
    """A point that must lie in the closure of the domain lies outside it."""


class RankDeficientError(DomainError):
    """
    The domain contains a complex affine line, so no separating frame exists.

    The offending line is attached as ``witness``.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class RealizationError(DomainError):
    """The bounded realization cannot be applied or inverted at a point."""


class BracketError(HypDomainError, RuntimeError):
    """Lower and upper distance bounds are inconsistent beyond rounding."""


class MapSpecError(HypDomainError, ValueError):
    """Ill-formed map expression or a map that breaks the split structure."""


class MapEvaluationError(HypDomainError, ArithmeticError):
    """Division by zero or logarithm of zero while evaluating a map."""


class DomainFileError(HypDomainError, ValueError):
    """A domain or map file failed schema or validity checks."""

    def __init__(self, message: str, details: Optional[List[str]] = None):
        super().__init__(message)
        self.details = details or []

    def __str__(self) -> str:
        if not self.details:
            return super().__str__()
        return super().__str__() + "\n  " + "\n  ".join(self.details)
