"""
Input validation utilities for planck-lab operations
"""
import math
import numbers
from typing import List, Optional


class DomainError(ValueError):
    """An operation was called outside its admissible range"""
    pass


class ConfigValidationError(Exception):
    """Experiment config failed validation; carries every issue found"""

    def __init__(self, issues: List[str]):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues) or "invalid config")


class ReportWriteError(OSError):
    """Report could not be written to disk"""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"failed to write report to {path}: {reason}")


def require_finite(name, value):
    """Validate that a real number is finite"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number")

    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite (got {value})")

    return value


def require_positive(name, value):
    """Validate a strictly positive finite number"""
    value = require_finite(name, value)
    if value <= 0:
        raise DomainError(f"{name} > 0 required (got {value})")
    return value


def require_range(name, value, low=None, high=None, low_inclusive=True, high_inclusive=True):
    """Validate that a finite number lies inside an interval"""
    value = require_finite(name, value)

    if low is not None:
        ok = value >= low if low_inclusive else value > low
        if not ok:
            op = ">=" if low_inclusive else ">"
            raise DomainError(f"{name} {op} {low} required (got {value})")

    if high is not None:
        ok = value <= high if high_inclusive else value < high
        if not ok:
            op = "<=" if high_inclusive else "<"
            raise DomainError(f"{name} {op} {high} required (got {value})")

    return value


def require_int(name, value, minimum: Optional[int] = None, even: bool = False):
    """Validate an integer count"""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if not (isinstance(value, float) and value.is_integer()):
            raise DomainError(f"{name} must be an integer (got {value!r})")

    value = int(value)
    if minimum is not None and value < minimum:
        raise DomainError(f"{name} >= {minimum} required (got {value})")

    if even and value % 2:
        raise DomainError(f"{name} must be even (got {value})")

    return value


def require_same_length(name_a, seq_a, name_b, seq_b):
    """Validate that two sequences pair up element by element"""
    if len(seq_a) != len(seq_b):
        raise DomainError(
            f"{name_a} and {name_b} must have equal length ({len(seq_a)} != {len(seq_b)})"
        )
