"""Exception types shared across the package."""

from __future__ import annotations


class NumericalFailure(RuntimeError):
    """A root finder or bracket check could not produce a trustworthy answer.

    ``bracket`` holds the last interval known (or assumed) to contain the
    root, so callers can inspect how far the search got.
    """

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class NoClosedForm(LookupError):
    """Raised when a closed-form result is requested for an unsupported case."""


class PreconditionError(ValueError):
    """An operation was called on an input outside its documented domain."""
