# fv_system/qop/algebra.py
"""
Dense operator kernels over labelled tensor slots.

Local operators are applied by tensor contraction on the affected axes only,
never by building the full embedded matrix: applying a two-site gate to a
D x D operator costs O(D^2 d^2) instead of O(D^3).
"""
import logging
from typing import Iterable, Optional, Sequence

import numpy as np

from config import Config
from fv_system.errors import DimensionLimitExceeded, DimensionMismatch, SlotCollision
from fv_system.models.operator import Operator, SlotLayout

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# RAW KERNELS
# ═══════════════════════════════════════════════════════════════════════════

def _apply_left_raw(matrix: np.ndarray, local: np.ndarray, positions: Sequence[int],
                    dims: Sequence[int]) -> np.ndarray:
    """(local ⊗ 1) · matrix, with `local` acting on the slots at `positions`."""
    k = len(positions)
    cols = matrix.shape[1]
    tensor = matrix.reshape(tuple(dims) + (cols,))
    local_dims = tuple(dims[p] for p in positions)
    local_t = local.reshape(local_dims + local_dims)
    out = np.tensordot(local_t, tensor, axes=(list(range(k, 2 * k)), list(positions)))
    out = np.moveaxis(out, list(range(k)), list(positions))
    return out.reshape(matrix.shape)


def _apply_right_raw(matrix: np.ndarray, local: np.ndarray, positions: Sequence[int],
                     dims: Sequence[int]) -> np.ndarray:
    """matrix · (local ⊗ 1)."""
    return _apply_left_raw(matrix.T, local.T, positions, dims).T


def check_dimension(layout: SlotLayout) -> None:
    """
    Raises:
        DimensionLimitExceeded: If layout exceeds MAX_DIMENSION
    """
    cap = Config.get(Config.MAX_DIMENSION)
    if layout.total_dim > cap:
        raise DimensionLimitExceeded(
            f"Layout {list(layout.ids)} has dimension {layout.total_dim} > cap {cap}"
        )


# ═══════════════════════════════════════════════════════════════════════════
# TENSOR STRUCTURE
# ═══════════════════════════════════════════════════════════════════════════

def tensor(a: Operator, b: Operator) -> Operator:
    """
    Kronecker product with concatenated layout.

    Raises:
        SlotCollision: If a and b share a slot id
    """
    layout = a.layout.concat(b.layout)
    return Operator(np.kron(a.matrix, b.matrix), layout)


def _positions(local: SlotLayout, target: SlotLayout) -> list:
    positions = []
    for slot_id, dim in local.slots:
        if slot_id not in target:
            raise SlotCollision(f"Slot {slot_id!r} cannot be placed into {list(target.ids)}")
        if target.dim(slot_id) != dim:
            raise DimensionMismatch(
                f"Slot {slot_id!r} has dimension {dim}, target expects {target.dim(slot_id)}"
            )
        positions.append(target.index(slot_id))
    return positions


def embed(a: Operator, target: SlotLayout) -> Operator:
    """
    Tensor `a` with identities on the slots it lacks, in `target` order.

    Raises:
        SlotCollision: If a has a slot missing from target
        DimensionMismatch: If a shared slot has a different dimension
    """
    if a.layout == target:
        return a
    positions = _positions(a.layout, target)
    eye = np.eye(target.total_dim, dtype=np.complex128)
    return Operator(_apply_left_raw(eye, a.matrix, positions, target.dims), target)


def apply_left(local: Operator, a: Operator) -> Operator:
    """(local ⊗ 1) · a without materializing the embedded local."""
    positions = _positions(local.layout, a.layout)
    return Operator(_apply_left_raw(a.matrix, local.matrix, positions, a.layout.dims), a.layout)


def apply_right(a: Operator, local: Operator) -> Operator:
    """a · (local ⊗ 1)."""
    positions = _positions(local.layout, a.layout)
    return Operator(_apply_right_raw(a.matrix, local.matrix, positions, a.layout.dims), a.layout)


def conjugate(u: Operator, a: Operator) -> Operator:
    """u · a · u† with u local to a subset of a's slots."""
    return apply_right(apply_left(u, a), u.adjoint())


def partial_trace(a: Operator, drop: Iterable[str]) -> Operator:
    """
    Trace out the slots in `drop`.

    Raises:
        UnknownSlot: If a dropped slot is not in the layout
    """
    drop = list(drop)
    remaining = a.layout.without(drop)
    if not drop:
        return a

    ids, dims = a.layout.ids, a.layout.dims
    n = len(dims)
    keep = [i for i in range(n) if ids[i] not in drop]
    gone = [i for i in range(n) if ids[i] in drop]
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    d_gone = int(np.prod([dims[i] for i in gone]))

    t = a.matrix.reshape(tuple(dims) * 2)
    t = t.transpose(keep + gone + [n + i for i in keep] + [n + i for i in gone])
    t = t.reshape(d_keep, d_gone, d_keep, d_gone)
    return Operator(np.einsum("ijkj->ik", t), remaining)


def reorder(a: Operator, target: SlotLayout) -> Operator:
    """Permute a's tensor factors into target's slot order (same slot set)."""
    if set(a.layout.ids) != set(target.ids) or len(a.layout) != len(target):
        raise SlotCollision(f"Cannot reorder {list(a.layout.ids)} into {list(target.ids)}")
    return embed(a, target)


# ═══════════════════════════════════════════════════════════════════════════
# NORMS AND FUNCTIONS
# ═══════════════════════════════════════════════════════════════════════════

def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def commutator_norm(a: Operator, b: Operator) -> float:
    """Frobenius norm of [a, b], embedding b into a's layout if needed."""
    if b.layout != a.layout:
        b = embed(b, a.layout)
    return float(np.linalg.norm(a.matrix @ b.matrix - b.matrix @ a.matrix))


def relative_gap(a: Operator, b: Operator, scale: Optional[float] = None) -> float:
    """‖a − b‖_F / max(scale, 1e-300); scale defaults to ‖b‖_F."""
    scale = b.norm() if scale is None else scale
    if scale == 0:
        return a.distance(b)
    return a.distance(b) / scale


def psd_sqrt(a: Operator) -> Operator:
    """Square root of the Hermitian part, negative eigenvalues clipped."""
    h = (a.matrix + a.matrix.conj().T) / 2
    w, v = np.linalg.eigh(h)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return Operator(root, a.layout)


def unitary_power(u: Operator, strength: float) -> Operator:
    """
    u ** strength on the principal branch; identity stays identity.

    Args:
        u: Unitary operator
        strength: Exponent (coupling strength), typically in [0, 1]
    """
    if strength == 1 or np.array_equal(u.matrix, np.eye(u.dim)):
        return u
    w, v = np.linalg.eig(u.matrix)
    phases = np.exp(1j * strength * np.angle(w))
    return Operator(v @ np.diag(phases) @ np.linalg.inv(v), u.layout)


def hermitian_part(a: Operator) -> Operator:
    return Operator((a.matrix + a.matrix.conj().T) / 2, a.layout)


__all__ = [
    'tensor',
    'embed',
    'apply_left',
    'apply_right',
    'conjugate',
    'partial_trace',
    'reorder',
    'commutator',
    'commutator_norm',
    'relative_gap',
    'psd_sqrt',
    'unitary_power',
    'hermitian_part',
    'check_dimension',
]
