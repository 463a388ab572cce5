"""Exception hierarchy shared across the package."""

from __future__ import annotations


class MidasVolError(Exception):
    """Base class for all package errors."""


class DomainError(MidasVolError, ValueError):
    """An input lies outside the domain of an operation."""


class LengthError(MidasVolError, ValueError):
    """A series is too short or two inputs have mismatched lengths."""


class IngestError(MidasVolError, ValueError):
    """A CSV file or in-memory series violates the ingestion rules."""


class CoverageError(MidasVolError, LookupError):
    """A required month is missing from a series."""


class AlignmentError(MidasVolError, ValueError):
    """Series that must share an index do not."""


class ZeroVarianceError(MidasVolError, ValueError):
    """A statistic is undefined because a series has no variation."""


class DegeneracyError(MidasVolError, ArithmeticError):
    """A normalisation constant vanished."""


class ConfigError(MidasVolError, ValueError):
    """A configuration file or argument set is invalid."""


class WindowError(MidasVolError, IndexError):
    """Not enough history precedes an index to fill a lag window."""

    def __init__(self, message: str, first_valid: int):
        super().__init__(f"{message} (first valid index: {first_valid})")
        self.first_valid = first_valid


class NumericError(MidasVolError, ArithmeticError):
    """A non-finite intermediate was produced."""

    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"{message} at index {index}"
        super().__init__(message)
        self.index = index


class ConvergenceError(MidasVolError, RuntimeError):
    """No optimizer restart converged; ``best`` carries the best-so-far result."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
