"""Exception types raised by the simulator."""

from typing import Optional


class PathIdentityError(ValueError):
    """Base class for every error raised by this package."""


class BasisMismatchError(PathIdentityError):
    """One state uses rail channels where the other uses polarization channels."""


class ZeroStateError(PathIdentityError):
    """An operation needed a nonzero state."""


class NonUnitaryError(PathIdentityError):
    """A linear element was built from a matrix that is not unitary."""


class DoubleRelabelError(PathIdentityError):
    """A grating was applied to a port that already carries polarization modes."""


class CircuitValidationError(PathIdentityError):
    """A circuit references undeclared modes or has inconsistent detectors."""


class GraphValidationError(PathIdentityError):
    """An experiment graph violates its edge rules."""


class MappingMismatchError(PathIdentityError):
    """Graph vertices and circuit detector ports do not correspond."""


class FileFormatError(PathIdentityError):
    """A circuit, graph or state file could not be parsed."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        self.path: Optional[str] = None
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
