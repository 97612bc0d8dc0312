"""
Error types for balk_metrics.

The CLI maps these onto exit codes: InputError -> 2, ConstructionError and
PretangentError -> 1 (with the attached report written out).
"""

from typing import Any, Dict, Optional


class BalkError(Exception):
    """Base class for all balk_metrics errors."""


class InputError(BalkError, ValueError):
    """Raised when an input is malformed, out of range or fails to parse."""


class ConstructionError(BalkError):
    """
    Raised when a construction precondition does not hold.

    Args:
        message: Human readable description
        report: The CheckReport carrying the violating witness, if any
        inconsistency: True when the failure contradicts an earlier passing check
    """

    def __init__(self, message: str, report: Optional[Any] = None, inconsistency: bool = False):
        super().__init__(message)
        self.report = report
        self.inconsistency = inconsistency


class PretangentError(BalkError):
    """Raised when a pretangent computation has to abort instead of guessing a limit."""

    def __init__(self, message: str, diagnostic: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
