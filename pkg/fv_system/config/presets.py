# fv_system/config/presets.py
"""
Named gates, states and single-site observables.

Experiment configs refer to these by name; matrices are built for a given
local dimension. Two-site gates act on (site ⊗ probe) with the site as the
first (most significant) factor, or on two neighbouring sites left to right.
"""
import logging
from enum import Enum
from typing import Any, Callable, Dict

import numpy as np

from fv_system.errors import DimensionMismatch
from fv_system.qop.basis import PAULI

logger = logging.getLogger(__name__)


class GatePreset(Enum):
    """Two-site gate presets."""
    IDENTITY = "identity"
    SWAP = "swap"
    CNOT = "cnot"  # probe (second factor) controls site (first factor)
    CPHASE = "cphase"
    PARTIAL_SWAP = "partial_swap"


class StatePreset(Enum):
    """Single-site (or two-site for BELL) state presets."""
    ZERO = "zero"
    ONE = "one"
    PLUS = "plus"
    MINUS = "minus"
    MAXIMALLY_MIXED = "maximally_mixed"
    BELL = "bell"


class ObservablePreset(Enum):
    """Single-site observable presets."""
    X = "x"
    Y = "y"
    Z = "z"
    PROJ0 = "proj0"
    PROJ1 = "proj1"


# Default free dynamics of shipped examples
DEFAULT_SWAP_ANGLE = np.pi / 5
DEFAULT_SWAP_PHASE = np.pi / 3


# ═══════════════════════════════════════════════════════════════════════════
# GATES
# ═══════════════════════════════════════════════════════════════════════════

def identity_gate(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=np.complex128)


def swap_gate(d: int) -> np.ndarray:
    """|a b> -> |b a>."""
    u = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            u[b * d + a, a * d + b] = 1
    return u


def cnot_gate(d: int) -> np.ndarray:
    """|s p> -> |s + p mod d, p>: the second factor controls the first."""
    u = np.zeros((d * d, d * d), dtype=np.complex128)
    for s in range(d):
        for p in range(d):
            u[((s + p) % d) * d + p, s * d + p] = 1
    return u


def cphase_gate(d: int, phase: float = np.pi) -> np.ndarray:
    """diag(exp(i·phase·a·b)) on |a b>; phase=π gives CZ for qubits."""
    diag = [np.exp(1j * phase * a * b) for a in range(d) for b in range(d)]
    return np.diag(np.array(diag, dtype=np.complex128))


def partial_swap_gate(d: int, angle: float, phase: float = 0.0) -> np.ndarray:
    """
    (cos θ·1 − i sin θ·SWAP) · CPHASE(φ).

    θ is the coupling strength: θ=0 is trivial and θ=π/2 a full SWAP up to
    a global phase.

    Args:
        d: Local dimension
        angle: Rotation angle θ
        phase: Controlled phase φ
    """
    swap = swap_gate(d)
    rotation = np.cos(angle) * np.eye(d * d) - 1j * np.sin(angle) * swap
    return rotation @ cphase_gate(d, phase)


_GATES: Dict[GatePreset, Callable[..., np.ndarray]] = {
    GatePreset.IDENTITY: identity_gate,
    GatePreset.SWAP: swap_gate,
    GatePreset.CNOT: cnot_gate,
    GatePreset.CPHASE: cphase_gate,
    GatePreset.PARTIAL_SWAP: partial_swap_gate,
}


def gate_preset(name: str, d: int, **params: Any) -> np.ndarray:
    """
    Build a named two-site gate.

    Raises:
        ValueError: If the name is unknown
        TypeError: If params do not fit the preset
    """
    return _GATES[GatePreset(name)](d, **params)


# ═══════════════════════════════════════════════════════════════════════════
# STATES
# ═══════════════════════════════════════════════════════════════════════════

def _pure(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    return np.outer(vector, vector.conj())


def basis_state(d: int, level: int) -> np.ndarray:
    if not 0 <= level < d:
        raise DimensionMismatch(f"Level {level} outside local dimension {d}")
    v = np.zeros(d, dtype=np.complex128)
    v[level] = 1
    return _pure(v)


def plus_state(d: int) -> np.ndarray:
    return _pure(np.ones(d, dtype=np.complex128))


def minus_state(d: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[0], v[1] = 1, -1
    return _pure(v)


def bell_state(d: int = 2) -> np.ndarray:
    """(|00> + |11> + ...)/√d on two sites."""
    v = np.zeros(d * d, dtype=np.complex128)
    for a in range(d):
        v[a * d + a] = 1
    return _pure(v)


def state_preset(name: str, d: int) -> np.ndarray:
    """
    Build a named state; BELL is two-site, the rest single-site.

    Raises:
        ValueError: If the name is unknown
    """
    preset = StatePreset(name)
    if preset is StatePreset.ZERO:
        return basis_state(d, 0)
    if preset is StatePreset.ONE:
        return basis_state(d, 1)
    if preset is StatePreset.PLUS:
        return plus_state(d)
    if preset is StatePreset.MINUS:
        return minus_state(d)
    if preset is StatePreset.MAXIMALLY_MIXED:
        return np.eye(d, dtype=np.complex128) / d
    return bell_state(d)


def preset_span(name: str) -> int:
    """Number of sites a state preset covers."""
    return 2 if StatePreset(name) is StatePreset.BELL else 1


# ═══════════════════════════════════════════════════════════════════════════
# OBSERVABLES
# ═══════════════════════════════════════════════════════════════════════════

def observable_preset(name: str, d: int) -> np.ndarray:
    """
    Build a named single-site observable.

    Raises:
        ValueError: If the name is unknown
        DimensionMismatch: Pauli presets requested for d != 2
    """
    preset = ObservablePreset(name)
    if preset is ObservablePreset.PROJ0:
        return basis_state(d, 0)
    if preset is ObservablePreset.PROJ1:
        return basis_state(d, 1)
    if d != 2:
        raise DimensionMismatch(f"Pauli preset {name!r} needs d=2, got {d}")
    return PAULI[preset.value].copy()
