"""
Error types raised across rdplab.

Each error subclasses a built-in so callers can catch generically
(ValueError for bad inputs, RuntimeError for numerical failures).
"""

from typing import Optional

__all__ = [
    "EnumerationTooLargeError",
    "MultipleStationaryDistributionsError",
    "InfiniteSelfInformationError",
    "AlphabetMismatchError",
    "DivergenceInfiniteError",
    "EmptySamplesError",
    "InfeasibleConstraintError",
    "ConvergenceFailureError",
    "DecodeError",
    "BudgetExceededError",
    "ConverseViolationError",
]


class EnumerationTooLargeError(ValueError):
    """
    Raised when a block space would exceed the enumeration cap

    :param size: number of entries that would be enumerated
    :param cap: the configured enumeration cap
    """

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(
            f"enumeration of {size} entries exceeds the enumeration cap of {cap}"
        )


class MultipleStationaryDistributionsError(ValueError):
    pass


class InfiniteSelfInformationError(ValueError):
    pass


class AlphabetMismatchError(ValueError):
    pass


class DivergenceInfiniteError(ValueError):
    pass


class EmptySamplesError(ValueError):
    pass


class InfeasibleConstraintError(ValueError):
    pass


class ConvergenceFailureError(RuntimeError):
    """
    Raised when an iterative solver hits its iteration limit

    :param message: description of the failure
    :param duality_gap: the last measured gap between upper and lower bounds
    """

    def __init__(self, message: str, duality_gap: Optional[float] = None):
        self.duality_gap = duality_gap
        if duality_gap is not None:
            message = f"{message} (duality gap {duality_gap:.3e})"
        super().__init__(message)


class DecodeError(ValueError):
    """
    Raised when a code symbol stream cannot be parsed

    :param message: description of the failure
    :param offset: position in the stream where parsing failed
    """

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class BudgetExceededError(ValueError):
    def __init__(self, requested: int, budget: int, what: str = "search"):
        self.requested = requested
        self.budget = budget
        super().__init__(
            f"{what} would visit {requested} points, exceeding the budget of {budget}"
        )


class ConverseViolationError(RuntimeError):
    pass
