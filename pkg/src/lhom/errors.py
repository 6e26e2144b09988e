"""Exception types shared across the package."""


class LHomError(Exception):
    """Base class for all package errors."""


class TargetTooLarge(LHomError):
    """An exhaustive search was asked to run beyond its size cap."""


class PreconditionViolated(LHomError):
    """An operation was called on input outside its domain."""


class InvalidDecomposition(LHomError):
    """A tree or path decomposition fails one of its invariants."""


class SearchExhausted(LHomError):
    """A constructive search found nothing where a result must exist."""


class BudgetExceeded(LHomError):
    """A brute-force enumeration ran past its node budget."""


class FormatError(LHomError):
    """A text file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
