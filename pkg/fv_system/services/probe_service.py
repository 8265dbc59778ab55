# fv_system/services/probe_service.py
"""
Probe couplings, scattering maps and induced observables.

Conventions:
    U_c = L_{T-1} G_{T-1} ··· L_0 G_0, where G_t applies the coupling gates
    of time t in ascending (probe_id, x) order before the free layer L_t.
    S = U_c† (U_f ⊗ 1) and Θ(A) = S A S†.
"""
import logging
from typing import List, Optional, Sequence, Union

from config import Config
from fv_system.causal import causal_complement, causal_future, causal_past, domain_of_dependence
from fv_system.errors import BadWindow, DimensionMismatch, GeometryViolation, LayoutCollision, SlotCollision
from fv_system.models.lattice import Cell, Region
from fv_system.models.operator import Operator, SlotLayout
from fv_system.models.reports import Lemma1Report
from fv_system.models.specs import ProbeSpec, ScatteringMap, SystemSpec, site_slot
from fv_system.qop.algebra import apply_left, check_dimension, commutator_norm, conjugate, embed, partial_trace, tensor
from fv_system.qop.basis import gell_mann_basis
from fv_system.qop.random_ops import make_rng
from fv_system.services.circuit_service import CircuitService

logger = logging.getLogger(__name__)

ProbeList = Union[ProbeSpec, Sequence[ProbeSpec]]


def _as_list(probes: ProbeList) -> List[ProbeSpec]:
    if isinstance(probes, ProbeSpec):
        return [probes]
    return list(probes)


class ProbeService:
    """Coupled circuits and scattering maps over one system."""

    def __init__(self, spec: SystemSpec, circuit: Optional[CircuitService] = None):
        self.spec = spec
        self.lattice = spec.lattice
        self.circuit = circuit or CircuitService(spec)

    # ============================================================
    # LAYOUT AND VALIDATION
    # ============================================================

    def joint_layout(self, probes: ProbeList) -> SlotLayout:
        """System sites followed by probe slots in the given order."""
        layout = self.spec.layout
        for probe in _as_list(probes):
            try:
                layout = layout.concat(probe.layout)
            except SlotCollision:
                raise LayoutCollision(f"Probe id {probe.probe_id!r} used twice")
        check_dimension(layout)
        return layout

    def _validate(self, probes: List[ProbeSpec], t_to: int) -> None:
        if not 0 <= t_to <= self.lattice.depth:
            raise BadWindow(f"t_to={t_to} outside 0..{self.lattice.depth}")
        d = self.spec.site_dim
        for probe in probes:
            expected = (d * probe.dim, d * probe.dim)
            for coupling in probe.couplings:
                cell = coupling.cell
                if not self.lattice.contains(cell):
                    raise GeometryViolation([
                        f"coupling of {probe.probe_id!r} at {cell.to_pair()} is outside the lattice"
                    ])
                if cell.t >= t_to:
                    raise BadWindow(
                        f"Coupling of {probe.probe_id!r} at t={cell.t} is not before t_to={t_to}"
                    )
                if coupling.gate.shape != expected:
                    raise DimensionMismatch(
                        f"Coupling gate of {probe.probe_id!r} has shape {coupling.gate.shape}, "
                        f"expected {expected}"
                    )

    def coupling_operators(self, probes: ProbeList, t: int) -> List[Operator]:
        """Coupling gates of time t as local Operators, in application order."""
        d = self.spec.site_dim
        entries = []
        for probe in _as_list(probes):
            for coupling in probe.couplings:
                if coupling.cell.t == t:
                    entries.append((probe.probe_id, coupling.cell.x, probe, coupling))
        entries.sort(key=lambda e: (e[0], e[1]))
        return [
            Operator(c.gate, SlotLayout.of([(site_slot(x), d), (p.slot, p.dim)]))
            for _, x, p, c in entries
        ]

    @staticmethod
    def _last_coupling_time(probes: List[ProbeSpec]) -> int:
        return max((c.cell.t for p in probes for c in p.couplings), default=-1)

    # ============================================================
    # CIRCUITS
    # ============================================================

    def coupled_circuit(self, probes: ProbeList, t_to: int) -> Operator:
        """
        U_c on the joint layout.

        Raises:
            BadWindow: If a coupling is not before t_to or t_to > T
            LayoutCollision: If two probes share an id
        """
        probes = _as_list(probes)
        layout = self.joint_layout(probes)
        self._validate(probes, t_to)
        u = Operator.identity(layout)
        for t in range(t_to):
            for gate in self.coupling_operators(probes, t):
                u = apply_left(gate, u)
            for gate in self.circuit.layer_operators(t):
                u = apply_left(gate, u)
        return u

    def scattering_operator(self, probes: ProbeList, t_to: Optional[int] = None) -> ScatteringMap:
        """
        S = U_c† (U_f ⊗ 1).

        Free layers after the last coupling cancel and are never applied, so
        S does not depend on t_to beyond the out-region condition. With no
        couplings at all S is exactly the identity.

        Raises:
            BadWindow: If some coupling is not strictly before t_to
        """
        probes = _as_list(probes)
        t_to = self.lattice.depth if t_to is None else t_to
        layout = self.joint_layout(probes)
        self._validate(probes, t_to)
        ids = tuple(p.probe_id for p in probes)

        last = self._last_coupling_time(probes)
        if last < 0:
            return ScatteringMap(Operator.identity(layout), ids, t_to)

        t_eff = last + 1
        s = embed(self.circuit.free_circuit(0, t_eff), layout)
        for t in range(t_eff - 1, -1, -1):
            for gate in self.circuit.layer_operators(t):
                s = apply_left(gate.adjoint(), s)
            for gate in reversed(self.coupling_operators(probes, t)):
                s = apply_left(gate.adjoint(), s)
        logger.debug(f"Scattering operator for probes {list(ids)} built through t={t_eff}")
        return ScatteringMap(s, ids, t_to)

    def extend_map(self, theta: ScatteringMap, layout: SlotLayout) -> ScatteringMap:
        """Θ̂: the same map with identities on the extra probe slots of `layout`."""
        if theta.layout == layout:
            return theta
        try:
            s = embed(theta.s_matrix, layout)
        except (SlotCollision, DimensionMismatch) as e:
            raise LayoutCollision(f"Cannot extend scattering map: {e}")
        ids = tuple(slot.split(":", 1)[1] for slot in layout.ids if slot.startswith("probe:"))
        return ScatteringMap(s, ids, theta.t_to)

    def theta_apply(self, theta: ScatteringMap, a: Operator) -> Operator:
        """
        S · a · S†, with a embedded into theta's layout.

        Raises:
            LayoutCollision: If a has slots theta does not carry
        """
        try:
            a = embed(a, theta.layout)
        except (SlotCollision, DimensionMismatch) as e:
            raise LayoutCollision(f"Operator does not fit scattering map layout: {e}")
        s = theta.s_matrix
        return Operator(s.matrix @ a.matrix @ s.matrix.conj().T, theta.layout)

    def probe_state(self, probes: ProbeList) -> Operator:
        """
        σ_1 ⊗ σ_2 ⊗ ... in the given order.

        Raises:
            LayoutCollision: If no probe is given
        """
        probes = _as_list(probes)
        if not probes:
            raise LayoutCollision("Probe state needs at least one probe")
        state = probes[0].initial_state
        for probe in probes[1:]:
            state = tensor(state, probe.initial_state)
        return state

    def induced_observable(self, theta: ScatteringMap, probes: ProbeList, o: Operator) -> Operator:
        """
        ε(o) = Tr_P[(1_S ⊗ σ) Θ(1 ⊗ o)] on the system layout.

        Args:
            theta: Scattering map of `probes`
            probes: Probes carried by theta, in layout order
            o: Observable on one or more probe slots
        """
        probes = _as_list(probes)
        if tuple(p.probe_id for p in probes) != theta.probe_ids:
            raise LayoutCollision(
                f"Probes {[p.probe_id for p in probes]} do not match map probes {list(theta.probe_ids)}"
            )
        if any(slot.startswith("site:") for slot in o.layout.ids):
            raise LayoutCollision("Induced observables take probe-only operators")
        pulled = self.theta_apply(theta, o)
        weighted = apply_left(self.probe_state(probes), pulled)
        return partial_trace(weighted, [p.slot for p in probes])

    # ============================================================
    # STATE EVOLUTION
    # ============================================================

    def evolve(self, probes: ProbeList, x: Operator, t_to: Optional[int] = None) -> Operator:
        """
        S† · x · S = U_f† U_c x U_c† U_f by local gate conjugation.

        x is embedded into the joint layout of `probes`.

        Raises:
            BadWindow: If some coupling is not strictly before t_to
        """
        probes = _as_list(probes)
        layout = self.joint_layout(probes)
        self._validate(probes, self.lattice.depth if t_to is None else t_to)
        x = embed(x, layout)
        last = self._last_coupling_time(probes)
        for t in range(last + 1):
            for gate in self.coupling_operators(probes, t):
                x = conjugate(gate, x)
            for gate in self.circuit.layer_operators(t):
                x = conjugate(gate, x)
        for t in range(last, -1, -1):
            for gate in self.circuit.layer_operators(t):
                x = conjugate(gate.adjoint(), x)
        return x

    # ============================================================
    # LOCALISATION
    # ============================================================

    def _system_generator(self, cell: Cell, index: int, layout: SlotLayout) -> Operator:
        return embed(self.circuit.generator(cell.x, cell.t, index), layout)

    def check_lemma1(self, theta: ScatteringMap, k: Region, trials: int = 50, seed: int = 0,
                     tol: Optional[float] = None, exhaustive: bool = False) -> Lemma1Report:
        """
        Numerically check that Θ localizes like a scattering map with zone k.

        (i)  ‖Θ(A⊗1) − A⊗1‖ ≤ tol·‖A‖ for generators A of A(K⊥).
        (ii) For generators A at out-region cells p (later than every
             coupling), Θ(A⊗1) commutes with A(N⁻⊥)⊗1 where
             N⁻ = (J⁻(p) ∩ row 0) ∖ J⁺(K); cells with p ∉ D(N⁻) are skipped.

        Args:
            theta: Scattering map to test
            k: Coupling zone of the probes in theta
            trials: Random generators drawn per property (ignored if exhaustive)
            seed: Seed for the generator draw
            tol: Relative tolerance (defaults to PHYSICS_TOLERANCE)
            exhaustive: Test every generator instead of a random draw

        Returns:
            Lemma1Report with max deviations and the worst generator
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        rng = make_rng(seed)
        layout = theta.layout
        basis_count = len(gell_mann_basis(self.spec.site_dim))
        report = Lemma1Report(tolerance=tol)
        worst = -1.0

        def _draw(cells: List[Cell]) -> List[tuple]:
            if not cells:
                return []
            if exhaustive:
                return [(c, i) for c in cells for i in range(1, basis_count)]
            picks = []
            for _ in range(trials):
                c = cells[int(rng.integers(len(cells)))]
                picks.append((c, int(rng.integers(1, basis_count))))
            return picks

        # (i) trivial action on K⊥
        for cell, index in _draw(sorted(causal_complement(k).cells)):
            a = self._system_generator(cell, index, layout)
            deviation = self.theta_apply(theta, a).distance(a) / a.norm()
            report.trivial_trials += 1
            report.max_trivial_deviation = max(report.max_trivial_deviation, deviation)
            if deviation > worst:
                worst = deviation
                report.witness = {"property": "trivial_action", "cell": cell.to_pair(), "basis_index": index}

        # (ii) out-region generators land in the in-region commutant
        last = max((c.t for c in k.cells), default=-1)
        future_k = causal_future(k)
        out_cells = [c for c in self.lattice.cells() if c.t > last]
        for cell, index in _draw(out_cells):
            p = Region.of(self.lattice, [cell])
            n_minus = (causal_past(p) & self.lattice.row(0)) - future_k
            if cell not in domain_of_dependence(n_minus):
                report.skipped += 1
                continue
            image = self.theta_apply(theta, self._system_generator(cell, index, layout))
            scale = image.norm()
            deviation = 0.0
            for g in self.circuit.algebra_generators(causal_complement(n_minus), include_identity=False):
                deviation = max(deviation, commutator_norm(image, g) / scale)
            report.localization_trials += 1
            report.max_localization_deviation = max(report.max_localization_deviation, deviation)
            if deviation > worst:
                worst = deviation
                report.witness = {"property": "localization", "cell": cell.to_pair(), "basis_index": index}

        logger.debug(
            f"Localization check: trivial={report.max_trivial_deviation:.3e} "
            f"localization={report.max_localization_deviation:.3e} skipped={report.skipped}"
        )
        return report

    def zone_of(self, probes: ProbeList) -> Region:
        """Union of the coupling zones."""
        cells = [c.cell for p in _as_list(probes) for c in p.couplings]
        return Region.of(self.lattice, cells)

