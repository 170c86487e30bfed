"""
Exception hierarchy for the qequil toolkit.

This module defines all custom exceptions used throughout the package
so that the CLI can map failures to stable exit codes.
"""

from typing import Any, Optional


class QEquilError(Exception):
    """Base exception for qequil."""

    def __init__(self, message: str, details: Optional[str] = None):
        self.message = message
        self.details = details
        super().__init__(self.message)


class ValidationError(QEquilError, ValueError):
    """Invalid input values (distributions, states, matrices, parameters)."""
    pass


class ShapeMismatchError(ValidationError):
    """Operands whose shapes or dimensions do not agree."""
    pass


class CapacityError(ValidationError):
    """Requested object exceeds a configured desk-scale cap."""
    pass


class NotEquilibriumError(ValidationError):
    """A distribution required to be a correlated equilibrium is not one."""

    def __init__(
        self,
        message: str,
        player: int,
        recommendation: int,
        deviation: int,
        violation: float,
        details: Optional[str] = None,
    ):
        self.player = player
        self.recommendation = recommendation
        self.deviation = deviation
        self.violation = violation
        super().__init__(message, details)


class ProtocolMismatchError(ValidationError):
    """Honest execution of a protocol does not reproduce its target."""
    pass


class SolverError(QEquilError):
    """Semidefinite or linear solver failure."""
    pass


class ConvergenceError(SolverError):
    """Solver finished but the certified gap is above tolerance."""

    def __init__(self, message: str, gap: float, result: Any = None, details: Optional[str] = None):
        self.gap = gap
        self.result = result
        super().__init__(message, details)


class ConfigurationError(QEquilError):
    """Configuration and setup errors."""
    pass


class ParseError(QEquilError):
    """Input file could not be parsed into a domain object."""
    pass


class FileOperationError(QEquilError):
    """File system operation errors."""
    pass
