"""
Exception hierarchy.

Every error raised by the engine derives from :class:`BaireOrderError` and
belongs to one of three families, which the command line maps onto exit
codes:

* :class:`ValidationError` (exit 1) - malformed or out-of-range input,
* :class:`BudgetExceeded` (exit 2) - a decomposition did not settle in time,
* :class:`InvariantViolation` (exit 3) - an internal check failed, i.e. a bug.
"""

from typing import Any, Optional


class BaireOrderError(Exception):
    """Base class for all engine errors."""

    exit_code = 1


class ValidationError(BaireOrderError, ValueError):
    """Input does not satisfy a precondition."""

    exit_code = 1


class OrdinalDepthError(ValidationError):
    pass


class SequenceValidationError(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class EqualSequences(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class NotDecreasingAcrossJoin(ValidationError):
    pass


class AnchorError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class UnpresentableTail(ValidationError):
    pass


class LabelError(ValidationError):
    pass


class NotALimitPoint(ValidationError):
    pass


class NegativeResult(ValidationError):
    pass


class NotComparable(ValidationError):
    pass


class NotStabilized(ValidationError):
    pass


class NotUSCError(ValidationError):
    pass


class PrecisionError(ValidationError):
    pass


class PrefixNotPresentable(ValidationError):
    pass


class WitnessPreconditionError(ValidationError):
    pass


class BudgetExceeded(BaireOrderError):
    """A decomposition reached its stage budget; ``trace`` holds every stage."""

    exit_code = 2

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace


class InvariantViolation(BaireOrderError, AssertionError):
    """An internal invariant failed. ``dump`` holds the offending data."""

    exit_code = 3

    def __init__(self, message: str, dump: Optional[Any] = None):
        super().__init__(message)
        self.dump = dump


class ParityViolation(InvariantViolation):
    pass


class EmptyAdmissibleInterval(InvariantViolation):
    pass
