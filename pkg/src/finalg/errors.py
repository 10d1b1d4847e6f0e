"""Exception hierarchy.

TheoremViolation is special: it marks a machine-checked invariant that the
library certifies and that failed on concrete data.  The CLI maps it (and
failed verification suites) to exit code 1, while usage and precondition
errors map to exit code 2.
"""
from __future__ import annotations


class FinalgError(Exception):
    """Base class for all library errors."""


class SignatureError(FinalgError):
    """Malformed algebra data or mismatched signatures."""


class NotACongruence(FinalgError):
    """A partition is not compatible with the algebra's operations."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class HypothesisError(FinalgError):
    """A documented precondition of a construction does not hold."""


class ResourceLimitError(FinalgError):
    """An explicit resource cap was exceeded; raise, never silently truncate."""


class TheoremViolation(FinalgError):
    """A certified invariant failed.  Carries a finite witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
