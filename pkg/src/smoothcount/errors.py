"""Exception hierarchy shared across the package."""
from __future__ import annotations


class SmoothcountError(Exception):
    """Base class for all package errors."""


class InputError(SmoothcountError, ValueError):
    """Malformed or out-of-range input (bad dimensions, indices, parameters)."""


class CertificationError(SmoothcountError):
    """The zero-free polydisc condition could not be established.

    Carries the failed check so callers can report the binding constraint.
    """

    def __init__(self, message, report=None, partial_assignment=None):
        super().__init__(message)
        self.report = report
        self.partial_assignment = partial_assignment


class WorkLimitError(SmoothcountError):
    """Requested enumeration exceeds the configured term budget."""

    def __init__(self, message, required=None, limit=None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class SolverError(SmoothcountError):
    """Convex solver failed to converge to an interior solution.

    ``best_p`` and ``residual`` describe the last iterate reached.
    """

    def __init__(self, message, best_p=None, residual=None):
        super().__init__(message)
        self.best_p = best_p
        self.residual = residual


class FactorizationError(SmoothcountError):
    """Symmetric factorization missed the reconstruction tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
