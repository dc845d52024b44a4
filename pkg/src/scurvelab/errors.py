"""Exception types shared across the workbench.

Long-running searches attach their best iterate to the exception so a
caller (or the command line driver) can report partial progress.
"""

from __future__ import annotations


class ScurvelabError(Exception):
    """Base class for errors raised by this package."""


class DegenerateConfigError(ScurvelabError):
    """Coincident nodes, empty supports, zero-length arcs and similar."""


class SingularFieldError(ScurvelabError):
    """A field was evaluated at (or too close to) one of its singular points."""


class ConvergenceError(ScurvelabError):
    """An iteration hit its cap before meeting tolerances.

    The ``result`` attribute, when present, holds the best iterate seen.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CollapseError(ScurvelabError):
    """A curve component shrank below resolution during a search."""

    def __init__(self, message="collapse detected", result=None):
        super().__init__(message)
        self.result = result


class UnboundedEnergyError(ScurvelabError):
    """The energy grew past its cap during a search."""

    def __init__(self, message="energy unbounded", result=None):
        super().__init__(message)
        self.result = result
