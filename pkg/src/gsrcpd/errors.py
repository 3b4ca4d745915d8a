"""Exception hierarchy shared by every gsrcpd module."""

from __future__ import annotations

from typing import Optional


class GSRError(Exception):
    """Base class for errors raised by gsrcpd."""


class DimensionMismatchError(GSRError, ValueError):
    """Observations with different dimensions were combined."""


class WindowSizeError(GSRError, ValueError):
    """A window or training stream is too short, odd, or mismatched."""


class DegenerateWindowError(GSRError, ArithmeticError):
    """A statistic denominator vanished (for example identical observations)."""


class CalibrationError(GSRError, ValueError):
    """Resampling records cannot produce a threshold table."""


class NumericalFault(GSRError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class IngestError(GSRError, ValueError):
    """Malformed input data, located by line and column when possible."""

    def __init__(
        self,
        message: str,
        *,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        self.path = path
        self.line = line
        self.column = column
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)


__all__ = [
    "CalibrationError",
    "DegenerateWindowError",
    "DimensionMismatchError",
    "GSRError",
    "IngestError",
    "NumericalFault",
    "WindowSizeError",
]
