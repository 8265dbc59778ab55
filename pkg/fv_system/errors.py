# fv_system/errors.py
"""
Error hierarchy for the lattice measurement toolkit.

Every failure a caller can act on has its own class; all derive from FVError
so the CLI can map whole families onto exit codes.
"""
from typing import Any, List, Optional, Tuple


class FVError(Exception):
    """Base error for fv_system."""
    pass


# ═══════════════════════════════════════════════════════════════════════════
# GEOMETRY
# ═══════════════════════════════════════════════════════════════════════════

class NoSliceFound(FVError):
    """No separating staircase slice exists on this finite lattice."""
    pass


class NotOrderable(FVError):
    """Region family (or requested order) violates the causal-order condition."""
    pass


class GeometryViolation(FVError):
    """
    Geometric precondition of a protocol failed.

    Attributes:
        failed: Human-readable list of failed hypotheses
    """

    def __init__(self, failed: List[str]):
        self.failed = list(failed)
        super().__init__("; ".join(self.failed))


# ═══════════════════════════════════════════════════════════════════════════
# OPERATOR ALGEBRA
# ═══════════════════════════════════════════════════════════════════════════

class SlotCollision(FVError):
    """Two layouts share a slot id where disjointness is required."""
    pass


class DimensionMismatch(FVError):
    """Matrix or slot dimensions disagree."""
    pass


class UnknownSlot(FVError):
    """Slot id not present in the layout."""
    pass


class LayoutCollision(FVError):
    """Operator cannot be placed into a scattering map's layout."""
    pass


class DimensionLimitExceeded(FVError):
    """Total Hilbert-space dimension exceeds the configured cap."""
    pass


class InvalidOperator(FVError):
    """
    Matrix fails its declared spectral contract (unitary, density, effect).

    Attributes:
        check: SpectrumCheck describing the failure
    """

    def __init__(self, message: str, check: Any = None):
        self.check = check
        super().__init__(message)


# ═══════════════════════════════════════════════════════════════════════════
# DYNAMICS AND MEASUREMENT
# ═══════════════════════════════════════════════════════════════════════════

class BadWindow(FVError):
    """Time window outside 0..T or before a coupling time."""
    pass


class ZeroProbability(FVError):
    """Post-selection on an outcome with (numerically) zero probability."""
    pass


class NotAnEffect(FVError):
    """Operator used as an effect is not in [0, 1]."""
    pass


class LocalizationViolation(FVError):
    """Observable fails the commutant test for its declared region."""
    pass


class NoWitnessFound(FVError):
    """
    Adversary search exhausted its budget without a signalling witness.

    Attributes:
        best_report: Report with the largest delta seen during the search
    """

    def __init__(self, message: str, best_report: Optional[Any] = None):
        self.best_report = best_report
        super().__init__(message)


# ═══════════════════════════════════════════════════════════════════════════
# EXPERIMENT CONFIGS
# ═══════════════════════════════════════════════════════════════════════════

class ExperimentConfigError(FVError):
    """Base for experiment config problems (exit code 2)."""

    def __init__(self, message: str, violations: Optional[List[Tuple[str, str]]] = None):
        self.violations = list(violations or [])
        if self.violations:
            listing = "; ".join(f"{pointer or '/'}: {text}" for pointer, text in self.violations)
            message = f"{message}: {listing}"
        super().__init__(message)


class ParseError(ExperimentConfigError):
    """Config file unreadable or not JSON."""
    pass


class SchemaError(ExperimentConfigError):
    """Config JSON does not match the schema."""
    pass


class PhysicsValidationError(ExperimentConfigError):
    """Config matrices or worldlines violate their physical contract."""
    pass


__all__ = [
    'FVError',
    'NoSliceFound',
    'NotOrderable',
    'GeometryViolation',
    'SlotCollision',
    'DimensionMismatch',
    'UnknownSlot',
    'LayoutCollision',
    'DimensionLimitExceeded',
    'InvalidOperator',
    'BadWindow',
    'ZeroProbability',
    'NotAnEffect',
    'LocalizationViolation',
    'NoWitnessFound',
    'ExperimentConfigError',
    'ParseError',
    'SchemaError',
    'PhysicsValidationError',
]
