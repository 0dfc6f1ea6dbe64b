"""
Exception hierarchy for maclab.

Every error raised on purpose by the library derives from `MaclabError`, so the
harness can map failures onto report statuses without catching unrelated bugs.
"""

from __future__ import annotations

__all__ = [
    "ConfigError",
    "ContourError",
    "ConvergenceError",
    "HigherOrderPoleError",
    "MaclabError",
    "ParameterDegeneracyError",
    "ParameterError",
    "PoleCollisionError",
    "RadiusViolationError",
]


class MaclabError(RuntimeError):
    """Base class for all maclab errors."""


class ParameterError(MaclabError):
    """The (q, t) pair violates 0 < q < 1, 0 <= t < 1, or t = 0 where t^-1 is needed."""


class ParameterDegeneracyError(MaclabError):
    """A Gram-Schmidt pivot or a denominator of the form 1 - q^a t^b vanished."""


class ConfigError(MaclabError):
    """
    A check configuration failed validation.

    Parameters
    ----------
    key : str
        The configuration key that caused the failure.
    message : str
        Human-readable description.
    """

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


class RadiusViolationError(ConfigError):
    """The radius conditions |a_i| R < 1 (or |a_i| R < q^m for hatted observables) fail."""


class ContourError(MaclabError):
    """A pole could not be classified as inside or outside its contour."""


class HigherOrderPoleError(MaclabError):
    """A non-simple pole away from the origin was met during residue evaluation."""


class PoleCollisionError(MaclabError):
    """A denominator vanished while evaluating an operator or kernel at a point."""


class ConvergenceError(MaclabError):
    """A numeric oracle or a tail bound did not reach its tolerance within budget."""
