"""
Exception hierarchy for scirtm.

Every error raised by the library derives from :class:`ScirtmError` and from
the builtin that best describes it, so callers may catch either one.
"""

from typing import Optional


class ScirtmError(Exception):
    """Base class of all scirtm errors."""


class DomainError(ScirtmError, ValueError):
    """A parameter lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """The twist coefficient was evaluated at one of its poles."""


class BudgetError(DomainError):
    """An iteration count exceeds the configured budget."""


class UnboundedOrbitError(ScirtmError, ArithmeticError):
    """A lifted orbit left the representable range of the phase."""


class EscapeError(ScirtmError, ArithmeticError):
    """The orbit left the control region while it was being iterated."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class DegenerateArgumentError(ScirtmError, ArithmeticError):
    """The orbit came too close to the elliptic fixed point to define an angle."""


class InsufficientDataError(ScirtmError, ValueError):
    """Too few valid samples for a fit."""


class NoTransitionError(ScirtmError, ValueError):
    """A bisection predicate has the same value at both ends of its bracket."""


class NotFoundError(ScirtmError, LookupError):
    """A root, homoclinic point or periodic orbit was not found in the scan window."""


class NonHyperbolicError(ScirtmError, TypeError):
    """An invariant-manifold base point is not hyperbolic."""


class ToleranceError(ScirtmError, ArithmeticError):
    """A series failed to meet its conjugacy residual target."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


class PrecisionError(ScirtmError, ArithmeticError):
    """The working precision cannot resolve the requested quantity."""

    def __init__(self, message: str, recommended_bits: int):
        super().__init__(message)
        self.recommended_bits = recommended_bits
