"""
Exceptions raised by shlrkit, each with the exit code the CLI reports.
"""

from typing import Optional


class ShlrError(Exception):
    """Base class for every error raised by shlrkit."""

    exit_code = 2


class ArgumentError(ShlrError, ValueError):
    """Raised when an operation receives incompatible arguments."""


class NameResolutionError(ShlrError, NameError):
    """Raised when an expression or declaration mentions an unknown name."""


class InvalidComplexError(ShlrError):
    """Raised when a differential fails to square to zero or breaks its ordering."""


class NotCofibrationError(ShlrError):
    """Raised when a construction requires a cofibration and gets something else."""


class ModelError(ShlrError):
    """Raised for problems in a model file.

    Args:
        message: Description of the problem.
        line: 1-based line of the offending token, if known.
        column: 1-based column of the offending token, if known.
    """

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class WindowTooSmallError(ShlrError):
    """Raised when an exact solve has no solution inside the configured truncation.

    Args:
        message: Description of the failed solve.
        weight: Weight at which the solve failed, if any.
        degree: Degree at which the solve failed, if any.
    """

    exit_code = 3

    def __init__(
        self, message: str, weight: Optional[int] = None, degree: Optional[int] = None
    ):
        self.weight = weight
        self.degree = degree
        details = []
        if weight is not None:
            details.append(f"weight {weight}")
        if degree is not None:
            details.append(f"degree {degree}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class UndeclaredNameError(ModelError, NameResolutionError):
    """Raised when a model file uses a name before declaring it."""


class ComputationError(ShlrError):
    """Raised when a command fails for a reason other than its input, such as exhausted recursion or memory."""
