# fv_system/models/operator.py
"""
Dense operators tagged with a tensor-slot layout.

A SlotLayout fixes the Kronecker order of subsystems (first slot most
significant). Operator wraps a complex square matrix of matching dimension;
DensityState and Effect are Operators that passed their spectral contract.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from fv_system.errors import DimensionMismatch, InvalidOperator, LayoutCollision, SlotCollision, UnknownSlot

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class SlotLayout:
    """Ordered (slot-id, dimension) pairs."""
    slots: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        ids = [s for s, _ in self.slots]
        if len(set(ids)) != len(ids):
            raise SlotCollision(f"Duplicate slot ids in layout: {ids}")
        for slot_id, dim in self.slots:
            if int(dim) < 1:
                raise DimensionMismatch(f"Slot {slot_id!r} has non-positive dimension {dim}")

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, int]]) -> "SlotLayout":
        return cls(tuple((str(s), int(d)) for s, d in pairs))

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(s for s, _ in self.slots)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.slots)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.slots)

    def __contains__(self, slot_id: str) -> bool:
        return slot_id in self.ids

    def index(self, slot_id: str) -> int:
        try:
            return self.ids.index(slot_id)
        except ValueError:
            raise UnknownSlot(f"Slot {slot_id!r} not in layout {list(self.ids)}")

    def dim(self, slot_id: str) -> int:
        return self.dims[self.index(slot_id)]

    def concat(self, other: "SlotLayout") -> "SlotLayout":
        shared = set(self.ids) & set(other.ids)
        if shared:
            raise SlotCollision(f"Layouts share slots: {sorted(shared)}")
        return SlotLayout(self.slots + other.slots)

    def without(self, drop: Iterable[str]) -> "SlotLayout":
        drop = set(drop)
        unknown = drop - set(self.ids)
        if unknown:
            raise UnknownSlot(f"Cannot drop unknown slots {sorted(unknown)}")
        return SlotLayout(tuple(p for p in self.slots if p[0] not in drop))

    def to_descriptor(self) -> List[List[Any]]:
        return [[s, d] for s, d in self.slots]


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex square matrix acting on `layout`."""
    matrix: np.ndarray
    layout: SlotLayout

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        dim = self.layout.total_dim
        if matrix.shape != (dim, dim):
            raise DimensionMismatch(
                f"Matrix shape {matrix.shape} does not match layout dimension {dim}"
            )
        object.__setattr__(self, "matrix", matrix)

    # ─────────────────────────────────────────────────────────────────────
    # Constructors
    # ─────────────────────────────────────────────────────────────────────

    @classmethod
    def identity(cls, layout: SlotLayout) -> "Operator":
        return cls(np.eye(layout.total_dim, dtype=np.complex128), layout)

    @classmethod
    def zeros(cls, layout: SlotLayout) -> "Operator":
        return cls(np.zeros((layout.total_dim,) * 2, dtype=np.complex128), layout)

    # ─────────────────────────────────────────────────────────────────────
    # Algebra
    # ─────────────────────────────────────────────────────────────────────

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _same_layout(self, other: "Operator") -> None:
        if other.layout != self.layout:
            raise LayoutCollision(
                f"Layouts differ: {list(self.layout.ids)} vs {list(other.layout.ids)}"
            )

    def adjoint(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.layout)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._same_layout(other)
        return Operator(self.matrix @ other.matrix, self.layout)

    def __add__(self, other: "Operator") -> "Operator":
        self._same_layout(other)
        return Operator(self.matrix + other.matrix, self.layout)

    def __sub__(self, other: "Operator") -> "Operator":
        self._same_layout(other)
        return Operator(self.matrix - other.matrix, self.layout)

    def __mul__(self, scalar: Scalar) -> "Operator":
        return Operator(self.matrix * scalar, self.layout)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix, self.layout)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.matrix))

    def distance(self, other: "Operator") -> float:
        """Frobenius distance."""
        self._same_layout(other)
        return float(np.linalg.norm(self.matrix - other.matrix))

    def expectation(self, observable: "Operator") -> complex:
        """Tr(self · observable) with self read as a state."""
        self._same_layout(observable)
        return complex(np.einsum("ij,ji->", self.matrix, observable.matrix))

    # ─────────────────────────────────────────────────────────────────────
    # Serialization
    # ─────────────────────────────────────────────────────────────────────

    def to_serializable(self) -> Dict[str, Any]:
        """Row-major [re, im] pairs plus the layout descriptor."""
        return {
            "layout": self.layout.to_descriptor(),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }


@dataclass(frozen=True, eq=False)
class DensityState(Operator):
    """Positive, unit-trace Operator."""

    @classmethod
    def validated(cls, op: Operator, tol: float) -> "DensityState":
        """
        Wrap an operator after checking the density contract.

        Raises:
            InvalidOperator: With the failing SpectrumCheck attached
        """
        from fv_system.qop.validator import is_density
        check = is_density(op, tol)
        if not check.is_valid:
            raise InvalidOperator(f"Not a density matrix: {check.details}", check)
        return cls(op.matrix, op.layout)


@dataclass(frozen=True, eq=False)
class Effect(Operator):
    """Hermitian Operator with spectrum in [0, 1]."""

    @classmethod
    def validated(cls, op: Operator, tol: float) -> "Effect":
        """
        Wrap an operator after checking the effect contract.

        Raises:
            InvalidOperator: With the failing SpectrumCheck attached
        """
        from fv_system.qop.validator import is_effect
        check = is_effect(op, tol)
        if not check.is_valid:
            raise InvalidOperator(f"Not an effect: {check.details}", check)
        return cls(op.matrix, op.layout)
