# fv_system/qop/validator.py
"""
Spectral validation of operators.

Checks never raise; they return a SpectrumCheck with a reason code, so
callers decide whether a failure is fatal.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from config import Config
from fv_system.models.operator import Operator

logger = logging.getLogger(__name__)


class SpectrumCode(Enum):
    """Result codes for spectral checks."""
    VALID = "valid"
    NOT_HERMITIAN = "not_hermitian"
    NOT_UNITARY = "not_unitary"
    NEGATIVE_EIGENVALUE = "negative_eigenvalue"  # below -tol
    EIGENVALUE_ABOVE_ONE = "eigenvalue_above_one"  # above 1 + tol
    TRACE_NOT_ONE = "trace_not_one"


@dataclass
class SpectrumCheck:
    """Result of a spectral check."""
    code: SpectrumCode
    details: Optional[str] = None

    @property
    def is_valid(self) -> bool:
        return self.code == SpectrumCode.VALID

    def __bool__(self) -> bool:
        return self.is_valid


def _tolerance(tol: Optional[float]) -> float:
    return Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol


def _hermiticity_gap(a: Operator) -> float:
    scale = max(1.0, float(np.linalg.norm(a.matrix)))
    return float(np.linalg.norm(a.matrix - a.matrix.conj().T)) / scale


def is_hermitian(a: Operator, tol: Optional[float] = None) -> SpectrumCheck:
    tol = _tolerance(tol)
    gap = _hermiticity_gap(a)
    if gap > tol:
        return SpectrumCheck(SpectrumCode.NOT_HERMITIAN, f"relative anti-Hermitian part {gap:.3e}")
    return SpectrumCheck(SpectrumCode.VALID)


def is_unitary(a: Operator, tol: Optional[float] = None) -> SpectrumCheck:
    tol = _tolerance(tol)
    gap = float(np.abs(a.matrix.conj().T @ a.matrix - np.eye(a.dim)).max())
    if gap > tol:
        return SpectrumCheck(SpectrumCode.NOT_UNITARY, f"max |U†U - 1| = {gap:.3e}")
    return SpectrumCheck(SpectrumCode.VALID)


def is_effect(a: Operator, tol: Optional[float] = None) -> SpectrumCheck:
    """
    Effect test: Hermitian with spectrum in [-tol, 1 + tol].

    Args:
        a: Operator to test
        tol: Absolute tolerance (defaults to PHYSICS_TOLERANCE)

    Returns:
        SpectrumCheck with code VALID, NOT_HERMITIAN, NEGATIVE_EIGENVALUE or
        EIGENVALUE_ABOVE_ONE

    Examples:
        >>> is_effect(Operator(np.diag([0.3, 0.7]), layout)).is_valid
        True
        >>> is_effect(Operator(np.diag([1.2, 0.0]), layout)).code
        <SpectrumCode.EIGENVALUE_ABOVE_ONE: 'eigenvalue_above_one'>
    """
    tol = _tolerance(tol)
    hermitian = is_hermitian(a, tol)
    if not hermitian:
        return hermitian

    eigenvalues = np.linalg.eigvalsh((a.matrix + a.matrix.conj().T) / 2)
    if eigenvalues[0] < -tol:
        return SpectrumCheck(SpectrumCode.NEGATIVE_EIGENVALUE, f"min eigenvalue {eigenvalues[0]:.3e}")
    if eigenvalues[-1] > 1 + tol:
        return SpectrumCheck(SpectrumCode.EIGENVALUE_ABOVE_ONE, f"max eigenvalue {eigenvalues[-1]:.6g}")
    return SpectrumCheck(SpectrumCode.VALID)


def is_density(a: Operator, tol: Optional[float] = None) -> SpectrumCheck:
    """Density test: Hermitian, eigenvalues >= -tol, trace 1 within tol."""
    tol = _tolerance(tol)
    hermitian = is_hermitian(a, tol)
    if not hermitian:
        return hermitian

    trace = a.trace()
    if abs(trace - 1) > tol:
        return SpectrumCheck(SpectrumCode.TRACE_NOT_ONE, f"trace {trace.real:.12g}{trace.imag:+.3e}j")

    eigenvalues = np.linalg.eigvalsh((a.matrix + a.matrix.conj().T) / 2)
    if eigenvalues[0] < -tol:
        return SpectrumCheck(SpectrumCode.NEGATIVE_EIGENVALUE, f"min eigenvalue {eigenvalues[0]:.3e}")
    return SpectrumCheck(SpectrumCode.VALID)


def min_eigenvalue(a: Operator) -> float:
    """Smallest eigenvalue of the Hermitian part."""
    return float(np.linalg.eigvalsh((a.matrix + a.matrix.conj().T) / 2)[0])


__all__ = [
    'SpectrumCode',
    'SpectrumCheck',
    'is_hermitian',
    'is_unitary',
    'is_effect',
    'is_density',
    'min_eigenvalue',
]
