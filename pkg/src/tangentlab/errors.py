"""Exception types shared across the package.

The CLI maps these onto process exit codes: hypothesis failures exit 2,
resource-cap errors exit 3, usage problems exit 64.
"""

from __future__ import annotations


class TangentLabError(Exception):
    """Base class for all package errors."""


class ValidationError(TangentLabError, ValueError):
    """A map, system, vector or grid failed construction-time checks."""


class AlphabetError(ValidationError):
    """A word contains a letter outside 1..m."""


class DepthCapError(TangentLabError):
    """Tree descent would exceed the configured depth cap."""

    def __init__(self, message: str, partial_depth: int):
        super().__init__(message)
        self.partial_depth = partial_depth


class EnumerationCapError(TangentLabError):
    """An enumeration would exceed the configured item cap."""

    def __init__(self, message: str, needed: int, cap: int):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class EnclosureError(TangentLabError):
    """The address prefix is too shallow to decide window tests unanimously.

    Callers should retry with a deeper prefix.
    """

    def __init__(self, message: str, level: int):
        super().__init__(message)
        self.level = level


class HypothesisFailure(TangentLabError):
    """A structural hypothesis the operation relies on does not hold."""


class EmptinessError(TangentLabError, ValueError):
    """A metric or test was requested on an empty grid set or view."""


class GridShapeError(TangentLabError, ValueError):
    """Grid sets of different resolutions were combined."""


class InvariantViolation(TangentLabError):
    """An internal consistency check failed; indicates a bug, not bad input."""
