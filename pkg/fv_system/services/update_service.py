# fv_system/services/update_service.py
"""
State-update calculus for one or more observers.

Every quantity is computed from X = S†(ρ ⊗ σ)S on system ⊗ probes, the
Schrödinger-picture image of the initial state:

    expectation          Tr[X (1 ⊗ O)]
    nonselective update  Tr_P[X]
    selective update     Tr_P[(1 ⊗ √E) X (1 ⊗ √E)] / Tr[X (1 ⊗ E)]

Multi-observer quantities use the super-circuit with all probes coupled at
once; sequential composition is checked against it.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config import Config
from fv_system.causal import enumerate_causal_orders, validate_order
from fv_system.errors import DimensionMismatch, NotAnEffect, NotOrderable, ZeroProbability
from fv_system.models.lattice import CausalOrder
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout
from fv_system.models.reports import FactorisationReport
from fv_system.models.specs import ObserverSpec, SystemSpec, UpdateMap, site_slot
from fv_system.qop.algebra import apply_left, apply_right, embed, partial_trace, psd_sqrt, tensor
from fv_system.qop.basis import gell_mann_basis
from fv_system.qop.validator import is_effect
from fv_system.services.probe_service import ProbeService

logger = logging.getLogger(__name__)

ObserverRef = Union[str, ObserverSpec]


def complement_effect(effect: Operator) -> Effect:
    """1 − E: the effect of the opposite outcome."""
    return Effect((Operator.identity(effect.layout) - effect).matrix, effect.layout)


def _real(value: complex, what: str) -> Union[float, complex]:
    if abs(value.imag) > Config.get(Config.PHYSICS_TOLERANCE) * max(1.0, abs(value.real)):
        logger.warning(f"{what} has imaginary part {value.imag:.3e}; observable is not Hermitian")
        return value
    return float(value.real)


class UpdateService:
    """Expectations, probabilities and update maps over one system."""

    def __init__(self, spec: SystemSpec, probes: Optional[ProbeService] = None):
        self.spec = spec
        self.lattice = spec.lattice
        self.probes = probes or ProbeService(spec)

    # ============================================================
    # HELPERS
    # ============================================================

    def _check_state(self, omega: Operator) -> None:
        if omega.layout != self.spec.layout:
            raise DimensionMismatch(
                f"State acts on {list(omega.layout.ids)}, expected the system layout"
            )

    def _evolved(self, omega: Operator, observers: Sequence[ObserverSpec],
                 t_to: Optional[int] = None) -> Operator:
        """X = S†(ρ ⊗ σ_1 ⊗ ...)S for the super-circuit of `observers`."""
        self._check_state(omega)
        probes = [o.probe for o in observers]
        if not probes:
            return omega
        joint = tensor(omega, self.probes.probe_state(probes))
        return self.probes.evolve(probes, joint, t_to)

    @staticmethod
    def _resolve(observers: Sequence[ObserverSpec], ref: ObserverRef) -> ObserverSpec:
        if isinstance(ref, ObserverSpec):
            return ref
        for o in observers:
            if o.name == ref:
                return o
        raise KeyError(f"Unknown observer {ref!r}")

    @staticmethod
    def _check_effect(effect: Operator, what: str) -> None:
        check = is_effect(effect, Config.get(Config.PHYSICS_TOLERANCE))
        if not check.is_valid:
            raise NotAnEffect(f"{what}: {check.details}")

    @staticmethod
    def _as_density(op: Operator) -> DensityState:
        return DensityState((op.matrix + op.matrix.conj().T) / 2, op.layout)

    @staticmethod
    def _probability(x: Operator, effect: Operator) -> float:
        return float(x.expectation(embed(effect, x.layout)).real)

    def _post_select(self, x: Operator, effect: Operator, drop: List[str]) -> Tuple[DensityState, float]:
        """Tr_P[(1⊗√E) X (1⊗√E)] / p together with p."""
        p = self._probability(x, effect)
        threshold = Config.get(Config.ZERO_PROBABILITY)
        if p <= threshold:
            raise ZeroProbability(f"Success probability {p:.3e} is below {threshold:.0e}")
        root = psd_sqrt(effect)
        kept = apply_right(apply_left(root, x), root)
        return self._as_density(partial_trace(kept, drop) * (1.0 / p)), p

    # ============================================================
    # SINGLE OBSERVER
    # ============================================================

    def expectation(self, omega: Operator, obs: ObserverSpec, t_to: Optional[int] = None) -> Union[float, complex]:
        """
        (ω⊗σ)(Θ(1⊗O)).

        Returns a float for Hermitian O; otherwise the complex value is
        returned and a warning logged.
        """
        x = self._evolved(omega, [obs], t_to)
        value = x.expectation(embed(obs.observable, x.layout))
        return _real(value, f"Expectation of {obs.name!r}")

    def nonselective_update(self, omega: Operator, obs: ObserverSpec, t_to: Optional[int] = None) -> DensityState:
        """ρ′ = Tr_P[S†(ρ⊗σ)S]."""
        x = self._evolved(omega, [obs], t_to)
        return self._as_density(partial_trace(x, [obs.probe.slot]))

    def selective_update(self, omega: Operator, obs: ObserverSpec, effect: Operator,
                         t_to: Optional[int] = None) -> Tuple[DensityState, float]:
        """
        Post-selected state ω_{A|E} and success probability p.

        Raises:
            NotAnEffect: If effect fails the effect test
            ZeroProbability: If p <= ZERO_PROBABILITY
        """
        self._check_effect(effect, f"Selective update for {obs.name!r}")
        x = self._evolved(omega, [obs], t_to)
        return self._post_select(x, effect, [obs.probe.slot])

    def apply_map(self, update: UpdateMap, omega: Operator, t_to: Optional[int] = None) -> DensityState:
        if update.effect is None:
            return self.nonselective_update(omega, update.observer, t_to)
        state, _ = self.selective_update(omega, update.observer, update.effect, t_to)
        return state

    # ============================================================
    # SEVERAL OBSERVERS
    # ============================================================

    def marginal_probability(self, omega: Operator, observers: Sequence[ObserverSpec],
                             target: ObserverRef, t_to: Optional[int] = None) -> float:
        """
        (ω⊗σ_all)(Θ_all(1⊗E_target)) with every observer coupled.

        Raises:
            NotAnEffect: If the target observable is not an effect
        """
        target = self._resolve(observers, target)
        self._check_effect(target.observable, f"Observable of {target.name!r}")
        x = self._evolved(omega, observers, t_to)
        return self._probability(x, target.observable)

    def joint_probability(self, omega: Operator, obs_a: ObserverSpec, effect_a: Operator,
                          obs_b: ObserverSpec, effect_b: Operator, t_to: Optional[int] = None) -> float:
        """(ω⊗σ_A⊗σ_B)(Θ_AB(1⊗E_A⊗E_B))."""
        self._check_effect(effect_a, f"Effect of {obs_a.name!r}")
        self._check_effect(effect_b, f"Effect of {obs_b.name!r}")
        x = self._evolved(omega, [obs_a, obs_b], t_to)
        return self._probability(x, tensor(effect_a, effect_b))

    def conditional_expectation(self, omega: Operator, obs_a: ObserverSpec, effect_a: Operator,
                                obs_b: ObserverSpec, t_to: Optional[int] = None) -> Union[float, complex]:
        """
        𝔼(O_B | E_A; ω) = (ω⊗σ)(Θ_AB(1⊗E_A⊗O_B)) / (ω⊗σ)(Θ_AB(1⊗E_A⊗1)).

        Raises:
            ZeroProbability: If the denominator is below ZERO_PROBABILITY
        """
        self._check_effect(effect_a, f"Conditioning effect of {obs_a.name!r}")
        x = self._evolved(omega, [obs_a, obs_b], t_to)
        p = self._probability(x, effect_a)
        threshold = Config.get(Config.ZERO_PROBABILITY)
        if p <= threshold:
            raise ZeroProbability(f"Conditioning probability {p:.3e} is below {threshold:.0e}")
        value = x.expectation(embed(tensor(effect_a, obs_b.observable), x.layout)) / p
        return _real(value, f"Conditional expectation of {obs_b.name!r}")

    def super_observer_expectation(self, omega: Operator, observers: Sequence[ObserverSpec],
                                   target: ObserverRef, observable: Optional[Operator] = None,
                                   t_to: Optional[int] = None) -> Union[float, complex]:
        """ω(ε_Obs(1⊗…⊗O_B⊗…⊗1)) with all probes in one circuit."""
        target = self._resolve(observers, target)
        o = target.observable if observable is None else observable
        x = self._evolved(omega, observers, t_to)
        return _real(x.expectation(embed(o, x.layout)), f"Super-observer expectation of {target.name!r}")

    def super_observer_update(self, omega: Operator, observers: Sequence[ObserverSpec],
                              effects: Optional[Dict[str, Operator]] = None,
                              t_to: Optional[int] = None) -> Tuple[DensityState, float]:
        """
        Single-shot update with every probe coupled.

        Without effects this is the nonselective update (probability 1);
        with effects {name: E} it post-selects on the tensor product of the
        given effects.
        """
        x = self._evolved(omega, observers, t_to)
        drop = [o.probe.slot for o in observers]
        if not effects:
            return self._as_density(partial_trace(x, drop)), 1.0
        joint = None
        for name, effect in effects.items():
            obs = self._resolve(observers, name)
            self._check_effect(effect, f"Effect of {obs.name!r}")
            joint = effect if joint is None else tensor(joint, effect)
        return self._post_select(x, joint, drop)

    # ============================================================
    # COMPOSITION
    # ============================================================

    def _zones(self, observers: Sequence[ObserverSpec]):
        return [o.zone(self.lattice) for o in observers]

    def compose_updates(self, maps: Sequence[UpdateMap], omega: Operator,
                        t_to: Optional[int] = None) -> DensityState:
        """
        (J_N ∘ ··· ∘ J_1)(ω), earliest map first.

        Raises:
            NotOrderable: If the maps are not given in a valid causal order
        """
        self._check_state(omega)
        validate_order(self._zones([m.observer for m in maps]))
        state = DensityState(omega.matrix, omega.layout)
        for update in maps:
            state = self.apply_map(update, state, t_to)
        return state

    def compose_selective(self, omega: Operator, observers: Sequence[ObserverSpec],
                          effects: Sequence[Operator], t_to: Optional[int] = None) -> Tuple[DensityState, float]:
        """
        Chain of selective updates and the joint success probability.

        Raises:
            NotOrderable: If observers are not in a valid causal order
            ZeroProbability: If any step has zero success probability
        """
        if len(observers) != len(effects):
            raise ValueError("One effect per observer is required")
        self._check_state(omega)
        validate_order(self._zones(observers))
        state = DensityState(omega.matrix, omega.layout)
        joint = 1.0
        for obs, effect in zip(observers, effects):
            state, p = self.selective_update(state, obs, effect, t_to)
            joint *= p
        return state, joint

    def causal_order(self, observers: Sequence[ObserverSpec]) -> CausalOrder:
        """
        First valid causal order of the observers' zones.

        Raises:
            NotOrderable: If no order exists
        """
        orders = enumerate_causal_orders(self._zones(observers))
        if not orders:
            raise NotOrderable(f"Observers {[o.name for o in observers]} admit no causal order")
        return orders[0]

    def n_observer_expectation(self, omega: Operator, observers: Sequence[ObserverSpec],
                               target: ObserverRef, t_to: Optional[int] = None,
                               order: Optional[CausalOrder] = None) -> Union[float, complex]:
        """
        ω_A(ε_B(O_B)): B's expectation after the nonselective updates of every
        observer preceding B in the causal order; later observers are ignored.

        Raises:
            NotOrderable: If the observers admit no causal order
        """
        target = self._resolve(observers, target)
        order = order or self.causal_order(observers)
        ranked = [observers[i] for i in order.indices]
        position = [o.name for o in ranked].index(target.name)
        before = [UpdateMap.nonselective(o) for o in ranked[:position]]
        state = self.compose_updates(before, omega, t_to)
        return self.expectation(state, target, t_to)

    def check_causal_factorisation(self, observers: Sequence[ObserverSpec],
                                   order: Optional[Union[CausalOrder, Sequence[str]]] = None,
                                   tol: Optional[float] = None, force: bool = False) -> FactorisationReport:
        """
        Compare Θ_Obs with Θ̂_{X1} ∘ ··· ∘ Θ̂_{XN} on generators of the
        system and probe algebras.

        Args:
            observers: Observer family
            order: CausalOrder or observer names, earliest first (default: first valid order)
            tol: Relative tolerance
            force: Skip order validation (for demonstrating failures)

        Raises:
            NotOrderable: If the order is invalid and force is not set
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        if order is None:
            ranked = [observers[i] for i in self.causal_order(observers).indices]
        elif isinstance(order, CausalOrder):
            ranked = [observers[i] for i in order.indices]
        else:
            ranked = [self._resolve(observers, name) for name in order]
        if not force:
            validate_order(self._zones(ranked))

        probes = [o.probe for o in observers]
        joint = self.probes.scattering_operator(probes)
        layout = joint.layout
        composed = Operator.identity(layout)
        for obs in ranked:
            single = self.probes.extend_map(self.probes.scattering_operator([obs.probe]), layout)
            composed = composed @ single.s_matrix

        deviation, count = 0.0, 0
        for g in self.generating_set(layout):
            direct = self.probes.theta_apply(joint, g)
            stacked = Operator(composed.matrix @ g.matrix @ composed.matrix.conj().T, layout)
            deviation = max(deviation, direct.distance(stacked) / g.norm())
            count += 1
        logger.debug(f"Factorisation deviation {deviation:.3e} over {count} generators")
        return FactorisationReport(
            max_deviation=deviation,
            generators_checked=count,
            order=tuple(o.name for o in ranked),
            tolerance=tol,
            forced=force,
        )

    def generating_set(self, layout: SlotLayout) -> List[Operator]:
        """Non-identity single-slot basis elements of every slot, embedded."""
        generators = []
        for slot_id, dim in layout.slots:
            for element in gell_mann_basis(dim)[1:]:
                local = Operator(element, SlotLayout.of([(slot_id, dim)]))
                generators.append(embed(local, layout))
        return generators


def site_marginal(state: Operator, x: int) -> Operator:
    """Reduced state of site x."""
    return partial_trace(state, [s for s in state.layout.ids if s != site_slot(x)])
