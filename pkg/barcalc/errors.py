"""Exceptions raised by barcalc. Each carries the CLI exit status it maps to."""

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_RESOURCE = 3
EXIT_VERIFICATION = 4


class BarcalcError(Exception):
    exit_status = EXIT_INVALID_INPUT


class InvalidInput(BarcalcError):
    pass


class CompositionNotZero(BarcalcError):
    pass


class TruncationMismatch(BarcalcError):
    pass


class TruncationTooLow(BarcalcError):
    pass


class IndexOutOfRange(BarcalcError):
    pass


class ShapeMismatch(BarcalcError):
    pass


class InvalidRing(BarcalcError):
    pass


class InvalidAlgebra(BarcalcError):
    pass


class InfiniteLevel(BarcalcError):
    exit_status = EXIT_RESOURCE


class ResourceBudgetExceeded(BarcalcError):
    exit_status = EXIT_RESOURCE


class VerificationFailed(BarcalcError):
    exit_status = EXIT_VERIFICATION


def check_budget(size, cap, what="level"):
    """Raise ResourceBudgetExceeded when an enumeration would exceed the cap."""
    if cap is not None and size > cap:
        raise ResourceBudgetExceeded(f"{what} has {size} elements, cap is {cap}")
