# fv_system/models/specs.py
"""
Specifications of the system, probes and observers.

SystemSpec: brickwork chain of qudits (the system theory).
ProbeSpec: pointlike probe with a coupling worldline.
ObserverSpec / UpdateMap: who measures what, and how the state is updated.
ScatteringMap: the unitary S with Θ(A) = S·A·S†.
"""
import hashlib
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fv_system.causal.geometry import validate_probe_worldline
from fv_system.errors import DimensionMismatch, GeometryViolation, InvalidOperator, NotAnEffect
from fv_system.models.lattice import Cell, Lattice, Region
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout
from fv_system.qop.random_ops import make_rng, random_unitary
from fv_system.qop.validator import is_effect

logger = logging.getLogger(__name__)


def site_slot(x: int) -> str:
    return f"site:{x}"


def probe_slot(probe_id: str) -> str:
    return f"probe:{probe_id}"


def _unitarity_gap(matrix: np.ndarray) -> float:
    return float(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])).max())


# ═══════════════════════════════════════════════════════════════════════════
# SYSTEM
# ═══════════════════════════════════════════════════════════════════════════

Bond = Tuple[int, np.ndarray]


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    Chain of W qudits with brickwork free dynamics.

    layer_gates[t] lists (left_site, gate) pairs; gate acts on sites
    (left_site, left_site + 1) and left_site has the parity of t. Missing
    bonds evolve trivially.
    """
    lattice: Lattice
    site_dim: int
    layer_gates: Tuple[Tuple[Bond, ...], ...]

    def __post_init__(self):
        d2 = self.site_dim ** 2
        if len(self.layer_gates) != self.lattice.depth:
            raise DimensionMismatch(
                f"Need {self.lattice.depth} layers of gates, got {len(self.layer_gates)}"
            )
        tol = Config.get(Config.PHYSICS_TOLERANCE)
        cleaned = []
        for t, layer in enumerate(self.layer_gates):
            seen = set()
            bonds = []
            for left, gate in layer:
                left = int(left)
                gate = np.asarray(gate, dtype=np.complex128)
                if left % 2 != t % 2:
                    raise GeometryViolation([f"bond ({left},{left + 1}) has wrong parity for layer {t}"])
                if not 0 <= left < self.lattice.width - 1:
                    raise GeometryViolation([f"bond ({left},{left + 1}) outside the chain"])
                if left in seen:
                    raise GeometryViolation([f"bond ({left},{left + 1}) repeated in layer {t}"])
                if gate.shape != (d2, d2):
                    raise DimensionMismatch(f"Gate on bond {left} at t={t} has shape {gate.shape}, expected {(d2, d2)}")
                gap = _unitarity_gap(gate)
                if gap > tol:
                    raise InvalidOperator(f"Gate on bond {left} at t={t} is not unitary (gap {gap:.3e})")
                seen.add(left)
                bonds.append((left, gate))
            cleaned.append(tuple(sorted(bonds, key=lambda b: b[0])))
        object.__setattr__(self, "layer_gates", tuple(cleaned))

    @classmethod
    def uniform(cls, lattice: Lattice, site_dim: int, gate: np.ndarray) -> "SystemSpec":
        """Same two-site gate on every bond of every layer."""
        layers = tuple(
            tuple((left, gate) for left in range(t % 2, lattice.width - 1, 2))
            for t in range(lattice.depth)
        )
        return cls(lattice, site_dim, layers)

    @classmethod
    def random(cls, lattice: Lattice, site_dim: int, seed) -> "SystemSpec":
        """Independent Haar gates on every bond."""
        rng = make_rng(seed)
        d2 = site_dim ** 2
        layers = tuple(
            tuple((left, random_unitary(d2, rng).matrix) for left in range(t % 2, lattice.width - 1, 2))
            for t in range(lattice.depth)
        )
        return cls(lattice, site_dim, layers)

    @property
    def layout(self) -> SlotLayout:
        return SlotLayout.of((site_slot(x), self.site_dim) for x in range(self.lattice.width))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.lattice.width}x{self.lattice.depth}d{self.site_dim}".encode())
        for t, layer in enumerate(self.layer_gates):
            for left, gate in layer:
                h.update(f"|{t}:{left}|".encode())
                h.update(np.ascontiguousarray(gate).tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class LocalObservable:
    """System observable together with the region it claims to live in."""
    op: Operator
    declared_region: Region


# ═══════════════════════════════════════════════════════════════════════════
# PROBES
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class Coupling:
    """Unitary on (site x ⊗ probe), applied before the free layer of time t."""
    cell: Cell
    gate: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cell", Cell.of(self.cell))
        object.__setattr__(self, "gate", np.asarray(self.gate, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class ProbeSpec:
    """
    Pointlike probe: dimension, initial state σ and coupling worldline.

    Coupling cells must form a timelike worldline unless `nonlocal_` is set.
    """
    probe_id: str
    dim: int
    initial_state: DensityState
    couplings: Tuple[Coupling, ...] = ()
    nonlocal_: bool = False

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if self.initial_state.layout != self.layout:
            raise DimensionMismatch(
                f"Probe {self.probe_id!r} state layout {list(self.initial_state.layout.ids)} "
                f"does not match {list(self.layout.ids)}"
            )
        tol = Config.get(Config.PHYSICS_TOLERANCE)
        for coupling in self.couplings:
            gap = _unitarity_gap(coupling.gate)
            if gap > tol:
                raise InvalidOperator(
                    f"Coupling gate of {self.probe_id!r} at {coupling.cell.to_pair()} is not unitary (gap {gap:.3e})"
                )
        cells = [c.cell for c in self.couplings]
        if len(set(cells)) != len(cells):
            raise GeometryViolation([f"probe {self.probe_id!r} couples twice at one cell"])
        if not self.nonlocal_:
            ordered = sorted(cells, key=lambda c: (c.t, c.x))
            if not validate_probe_worldline(ordered):
                raise GeometryViolation([
                    f"couplings of probe {self.probe_id!r} do not form a timelike worldline "
                    f"(set nonlocal to model a non-local apparatus)"
                ])

    @property
    def slot(self) -> str:
        return probe_slot(self.probe_id)

    @property
    def layout(self) -> SlotLayout:
        return SlotLayout.of([(self.slot, self.dim)])

    def zone(self, lattice: Lattice) -> Region:
        """Coupling zone K."""
        return Region.of(lattice, (c.cell for c in self.couplings))

    def with_couplings(self, couplings: Sequence[Coupling], nonlocal_: Optional[bool] = None) -> "ProbeSpec":
        flag = self.nonlocal_ if nonlocal_ is None else nonlocal_
        return ProbeSpec(self.probe_id, self.dim, self.initial_state, tuple(couplings), flag)


@dataclass(frozen=True, eq=False)
class ScatteringMap:
    """
    Θ(A) = S·A·S† on system ⊗ involved probes.

    `probe_ids` lists the probes in layout order after the system sites.
    """
    s_matrix: Operator
    probe_ids: Tuple[str, ...]
    t_to: int

    @property
    def layout(self) -> SlotLayout:
        return self.s_matrix.layout


# ═══════════════════════════════════════════════════════════════════════════
# OBSERVERS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class ObserverSpec:
    """Named observer: probe plus the probe observable it reads out."""
    name: str
    probe: ProbeSpec
    observable: Operator

    def __post_init__(self):
        if self.observable.layout != self.probe.layout:
            raise DimensionMismatch(
                f"Observable of {self.name!r} acts on {list(self.observable.layout.ids)}, "
                f"probe slot is {self.probe.slot!r}"
            )

    def zone(self, lattice: Lattice) -> Region:
        return self.probe.zone(lattice)

    def with_probe(self, probe: ProbeSpec) -> "ObserverSpec":
        return ObserverSpec(self.name, probe, self.observable)


@dataclass(frozen=True, eq=False)
class UpdateMap:
    """Non-selective map J_A, or selective map J_{A|E} when `effect` is set."""
    observer: ObserverSpec
    effect: Optional[Effect] = None

    def __post_init__(self):
        if self.effect is None:
            return
        check = is_effect(self.effect, Config.get(Config.PHYSICS_TOLERANCE))
        if not check.is_valid:
            raise NotAnEffect(f"Selective update for {self.observer.name!r}: {check.details}")
        if self.effect.layout != self.observer.probe.layout:
            raise DimensionMismatch(f"Effect for {self.observer.name!r} is not on the probe slot")

    @property
    def kind(self) -> str:
        return "nonselective" if self.effect is None else "selective"

    @classmethod
    def nonselective(cls, observer: ObserverSpec) -> "UpdateMap":
        return cls(observer)

    @classmethod
    def selective(cls, observer: ObserverSpec, effect: Operator) -> "UpdateMap":
        return cls(observer, Effect(effect.matrix, effect.layout))


# ═══════════════════════════════════════════════════════════════════════════
# PROTOCOL INPUTS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class SorkinConfig:
    """
    Alice, Bob and Charlie on one system.

    Charlie is either a LocalObservable C of O₃ or an observer whose induced
    observable plays the role of C (exactly one must be given).
    """
    system: SystemSpec
    alice: ObserverSpec
    bob: ObserverSpec
    charlie_region: Region
    omega: DensityState
    charlie_observable: Optional[LocalObservable] = None
    charlie: Optional[ObserverSpec] = None
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if (self.charlie_observable is None) == (self.charlie is None):
            raise ValueError("Give exactly one of charlie_observable and charlie")


@dataclass(frozen=True, eq=False)
class AdversaryConfig(SorkinConfig):
    """Sorkin arrangement with a non-local Bob and a witness search budget."""
    threshold: Optional[float] = None
    budget: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Theorem2Config:
    """N observers, a target B and an observer Y spacelike to B."""
    system: SystemSpec
    observers: Tuple[ObserverSpec, ...]
    target: str
    spacelike: str
    omega: DensityState
    tol: float = 1e-9
    seed: int = 0
    allow_disconnected_target: bool = False
