from __future__ import annotations

from typing import Any


class BetheSchubertError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BetheSchubertError, ValueError):
    """Raised when an operation receives values outside its coefficient domain."""


class NumericError(BetheSchubertError):
    """Raised when a numeric procedure fails to reach its residual target."""

    def __init__(self, message: str, *, worst_residual: Any = None) -> None:
        super().__init__(message)
        self.worst_residual = worst_residual


class SchubertError(BetheSchubertError, ValueError):
    """Raised for invalid Schubert indices, box mismatches and box overflow."""


class ProblemRejection(BetheSchubertError, ValueError):
    """Raised when instance data violates a defining relation of a Schubert problem."""

    def __init__(self, constraint: str, message: str) -> None:
        super().__init__(f"[{constraint}] {message}")
        self.constraint = constraint


class BetheEvaluationError(BetheSchubertError):
    """Raised when the Bethe system is evaluated at an exact collision."""

    def __init__(self, message: str, *, pair: tuple[Any, Any]) -> None:
        super().__init__(message)
        self.pair = pair


class StructuralError(BetheSchubertError):
    """Raised when a reconstruction step meets a structure it cannot handle."""

    def __init__(self, message: str, *, location: Any = None) -> None:
        super().__init__(message if location is None else f"{message} (at {location})")
        self.location = location


class ReconstructionError(BetheSchubertError):
    """Raised when the polynomial kernel of an operator has the wrong dimension."""

    def __init__(self, message: str, *, dimension: int, gap: Any = None) -> None:
        super().__init__(message)
        self.dimension = dimension
        self.gap = gap


class DegeneracyError(BetheSchubertError, ValueError):
    """Raised when a polynomial basis is linearly dependent."""


class ProblemFileError(BetheSchubertError, ValueError):
    """Raised when a problem file cannot be read or parsed."""
