# fv_system/services/circuit_service.py
"""
Free brickwork dynamics of the system chain.

One geometric time step is one brick layer; layer t acts on bonds whose left
site has the parity of t, so Heisenberg support grows by at most one site per
layer in each direction.
"""
import logging
from typing import List, Optional, Set, Union

import numpy as np
from cachetools import LRUCache

from config import Config
from fv_system.causal import causal_complement, footprint_sites
from fv_system.errors import BadWindow, DimensionMismatch, LocalizationViolation, UnknownSlot
from fv_system.models.lattice import Cell, CellLike, Region
from fv_system.models.operator import Operator, SlotLayout
from fv_system.models.specs import LocalObservable, SystemSpec, site_slot
from fv_system.qop.algebra import apply_left, check_dimension, commutator_norm, conjugate, embed, partial_trace
from fv_system.qop.basis import gell_mann_basis

logger = logging.getLogger(__name__)

SiteOperator = Union[np.ndarray, Operator]


class CircuitService:
    """
    Free circuit, Heisenberg pullback and local algebras of one SystemSpec.

    Pulled-back basis generators are memoized per instance in an LRU cache
    keyed by (x, t, basis index).
    """

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.lattice = spec.lattice
        self.layout = spec.layout
        check_dimension(self.layout)
        self._generator_cache: LRUCache = LRUCache(maxsize=Config.get(Config.GENERATOR_CACHE_SIZE))

    # ============================================================
    # LAYERS
    # ============================================================

    def layer_operators(self, t: int) -> List[Operator]:
        """Bond gates of layer t as local two-site Operators."""
        d = self.spec.site_dim
        return [
            Operator(gate, SlotLayout.of([(site_slot(left), d), (site_slot(left + 1), d)]))
            for left, gate in self.spec.layer_gates[t]
        ]

    def _check_window(self, t_from: int, t_to: int) -> None:
        if not 0 <= t_from <= t_to <= self.lattice.depth:
            raise BadWindow(
                f"Window [{t_from}, {t_to}) outside 0..{self.lattice.depth}"
            )

    def free_circuit(self, t_from: int, t_to: int) -> Operator:
        """
        U = L_{t_to-1} ··· L_{t_from} on the system layout.

        Raises:
            BadWindow: Unless 0 <= t_from <= t_to <= T
        """
        self._check_window(t_from, t_to)
        u = Operator.identity(self.layout)
        for t in range(t_from, t_to):
            for gate in self.layer_operators(t):
                u = apply_left(gate, u)
        return u

    # ============================================================
    # HEISENBERG PICTURE
    # ============================================================

    def site_operator(self, b: SiteOperator, x: int) -> Operator:
        """Wrap a d x d matrix (or single-slot Operator) as an operator on site x."""
        if not 0 <= x < self.lattice.width:
            raise UnknownSlot(f"Site {x} outside chain of width {self.lattice.width}")
        matrix = b.matrix if isinstance(b, Operator) else np.asarray(b, dtype=np.complex128)
        d = self.spec.site_dim
        if matrix.shape != (d, d):
            raise DimensionMismatch(f"Site operator has shape {matrix.shape}, expected {(d, d)}")
        return Operator(matrix, SlotLayout.of([(site_slot(x), d)]))

    def evolve_heisenberg(self, a: Operator, t_from: int, t_to: int) -> Operator:
        """
        U(t_from -> t_to)† · a · U(t_from -> t_to), applied layer by layer.

        `a` may carry extra (probe) slots; only site slots are touched.
        """
        self._check_window(t_from, t_to)
        for t in range(t_to - 1, t_from - 1, -1):
            for gate in self.layer_operators(t):
                a = conjugate(gate.adjoint(), a)
        return a

    def evolve_state(self, rho: Operator, t_from: int, t_to: int) -> Operator:
        """Schrödinger-picture counterpart: U · rho · U†."""
        self._check_window(t_from, t_to)
        for t in range(t_from, t_to):
            for gate in self.layer_operators(t):
                rho = conjugate(gate, rho)
        return rho

    def heisenberg_pullback(self, b: SiteOperator, x: int, t: int) -> Operator:
        """
        Time-0 representative of the single-site observable b at cell (x, t).

        Raises:
            BadWindow: Unless 0 <= t <= T
            UnknownSlot: If x is outside the chain
        """
        local = self.site_operator(b, x)
        self._check_window(0, t)
        return self.evolve_heisenberg(embed(local, self.layout), 0, t)

    def local_observable(self, b: SiteOperator, cell: CellLike) -> LocalObservable:
        """Pull b at `cell` back to t=0 and tag it with {cell}."""
        cell = Cell.of(cell)
        op = self.heisenberg_pullback(b, cell.x, cell.t)
        return LocalObservable(op, Region.of(self.lattice, [cell]))

    # ============================================================
    # LOCAL ALGEBRAS
    # ============================================================

    def generator(self, x: int, t: int, index: int) -> Operator:
        """Basis element `index` at cell (x, t), pulled back to t=0."""
        key = (x, t, index)
        cached = self._generator_cache.get(key)
        if cached is not None:
            return cached
        basis = gell_mann_basis(self.spec.site_dim)
        op = self.heisenberg_pullback(basis[index], x, t)
        self._generator_cache[key] = op
        return op

    def algebra_generators(self, n: Region, include_identity: bool = True) -> List[Operator]:
        """
        Pulled-back Gell-Mann basis at every cell of n, cells in sorted order.

        Args:
            n: Region of the lattice
            include_identity: Keep the identity element of each basis

        Returns:
            Generators of A(N) on the system layout
        """
        start = 0 if include_identity else 1
        count = self.spec.site_dim ** 2
        return [
            self.generator(cell.x, cell.t, index)
            for cell in n
            for index in range(start, count)
        ]

    def support_of(self, a: Operator, tol: Optional[float] = None) -> Set[int]:
        """
        Sites on which `a` acts nontrivially.

        Site x is in the support iff ‖a − Tr_x(a)/d ⊗ 1_x‖_F > tol·‖a‖_F.
        Non-site slots of a joint layout are ignored.
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        scale = a.norm()
        if scale == 0:
            return set()
        sites = set()
        for x in range(self.lattice.width):
            slot = site_slot(x)
            if slot not in a.layout:
                continue
            reduced = partial_trace(a, [slot]) * (1.0 / a.layout.dim(slot))
            if a.distance(embed(reduced, a.layout)) > tol * scale:
                sites.add(x)
        return sites

    def commutant_deviation(self, c: Operator, n: Region) -> float:
        """max ‖[c, g]‖_F / ‖c‖_F over non-identity generators g of A(N⊥)."""
        scale = c.norm()
        if scale == 0:
            return 0.0
        worst = 0.0
        for g in self.algebra_generators(causal_complement(n), include_identity=False):
            worst = max(worst, commutator_norm(c, g) / scale)
        return worst

    def commutant_membership(self, c: Operator, n: Region, tol: Optional[float] = None) -> bool:
        """
        True iff c commutes with every generator of A(causal_complement(n)).

        c may live on system ⊗ probes; generators are embedded as g ⊗ 1.
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        deviation = self.commutant_deviation(c, n)
        logger.debug(f"Commutant deviation for region of {len(n)} cells: {deviation:.3e}")
        return deviation <= tol

    def validate_local_observable(self, obs: LocalObservable, tol: Optional[float] = None) -> None:
        """
        Check that obs is localizable in its declared region.

        Raises:
            LocalizationViolation: If the support leaves the region's footprint
                or the commutant test fails
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        support = self.support_of(obs.op, tol)
        footprint = footprint_sites(obs.declared_region)
        if not support <= footprint:
            logger.warning(f"Observable support {sorted(support)} outside footprint {sorted(footprint)}")
            raise LocalizationViolation(
                f"Support {sorted(support)} leaves the t=0 footprint {sorted(footprint)} "
                f"of region {obs.declared_region.to_pairs()}"
            )
        deviation = self.commutant_deviation(obs.op, obs.declared_region)
        if deviation > tol:
            logger.warning(f"Observable fails commutant test: deviation {deviation:.3e}")
            raise LocalizationViolation(
                f"Observable does not commute with A(N⊥) for N={obs.declared_region.to_pairs()} "
                f"(deviation {deviation:.3e})"
            )

