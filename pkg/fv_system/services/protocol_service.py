# fv_system/services/protocol_service.py
"""
End-to-end no-signalling experiments.

run_sorkin       Alice, Bob, Charlie with local probes: Charlie's statistics
                 must not depend on Alice's coupling.
run_adversary    Same arrangement with a non-local Bob: signalling must show.
run_theorem2     N observers: deleting an observer spacelike to the target
                 must not change the target's expectation.
check_spacelike_commutation
                 Two spacelike observers: maps commute; conditioning is
                 inert iff the induced observables are uncorrelated.

Geometric hypotheses are validated before any numerics run and raise
GeometryViolation listing every failed condition.
"""
import logging
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fv_system.causal import (
    are_spacelike,
    causal_complement,
    causal_future,
    causal_hull,
    causal_past,
    domain_of_dependence,
    find_separating_slice,
    is_connected,
)
from fv_system.errors import GeometryViolation, NoSliceFound, NoWitnessFound
from fv_system.models.operator import Operator, SlotLayout
from fv_system.models.reports import CommutationReport, SignallingReport
from fv_system.models.specs import (
    AdversaryConfig,
    Coupling,
    LocalObservable,
    ObserverSpec,
    SorkinConfig,
    SystemSpec,
    Theorem2Config,
)
from fv_system.qop.algebra import apply_left, embed, partial_trace, unitary_power
from fv_system.qop.random_ops import make_rng, random_product_state, substream_seed
from fv_system.services.circuit_service import CircuitService
from fv_system.services.probe_service import ProbeService
from fv_system.services.update_service import UpdateService

logger = logging.getLogger(__name__)


class ProtocolService:
    """Signalling experiments over one system."""

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.lattice = spec.lattice
        self.circuit = CircuitService(spec)
        self.probes = ProbeService(spec, self.circuit)
        self.updates = UpdateService(spec, self.probes)

    # ============================================================
    # SORKIN
    # ============================================================

    def sorkin_violations(self, config: SorkinConfig) -> List[str]:
        """Failed geometric hypotheses of the tripartite arrangement (empty if none)."""
        k1 = config.alice.zone(self.lattice)
        k2 = config.bob.zone(self.lattice)
        o3 = config.charlie_region
        failed = []
        if not k2.isdisjoint(causal_past(k1)):
            failed.append("K2 meets J-(K1): Bob is not after Alice")
        if not o3.isdisjoint(causal_past(k2)):
            failed.append("O3 meets J-(K2): Charlie is not after Bob")
        if not are_spacelike(o3, k1):
            failed.append("O3 is not spacelike to K1")
        if config.charlie is not None and not config.charlie.zone(self.lattice).issubset(o3):
            failed.append("Charlie's coupling zone is not inside O3")
        return failed

    def _charlie_operator(self, config: SorkinConfig) -> Operator:
        """C as a system operator: the local observable or Charlie's induced observable."""
        if config.charlie_observable is not None:
            return config.charlie_observable.op
        theta = self.probes.scattering_operator([config.charlie.probe])
        return self.probes.induced_observable(theta, [config.charlie.probe], config.charlie.observable)

    def _validate_charlie(self, config: SorkinConfig, c: Operator) -> None:
        self.circuit.validate_local_observable(LocalObservable(c, config.charlie_region), config.tol)

    def evaluate_signalling(self, config: SorkinConfig, omega: Optional[Operator] = None,
                            bob: Optional[ObserverSpec] = None) -> Tuple[float, float, float, float]:
        """
        ω_AB(C), ω_B(C), |difference| and the operator gap, without validation.

        ω_AB composes Alice's then Bob's nonselective updates; ω_B drops
        Alice. The operator gap is ‖(Θ̂_A∘Θ̂_B)(Ĉ) − Θ̂_B(Ĉ)‖_F on
        system ⊗ P_A ⊗ P_B.
        """
        omega = config.omega if omega is None else omega
        bob = config.bob if bob is None else bob
        alice = config.alice
        c = self._charlie_operator(config)

        rho_b = self.updates.nonselective_update(omega, bob)
        rho_ab = self.updates.nonselective_update(self.updates.nonselective_update(omega, alice), bob)
        value_ab = float(rho_ab.expectation(c).real)
        value_b = float(rho_b.expectation(c).real)

        layout = self.probes.joint_layout([alice.probe, bob.probe])
        theta_a = self.probes.extend_map(self.probes.scattering_operator([alice.probe]), layout)
        theta_b = self.probes.extend_map(self.probes.scattering_operator([bob.probe]), layout)
        after_b = self.probes.theta_apply(theta_b, c)
        after_ab = self.probes.theta_apply(theta_a, after_b)
        operator_delta = after_ab.distance(after_b)
        return value_ab, value_b, abs(value_ab - value_b), operator_delta

    def _slice_diagnostics(self, config: SorkinConfig) -> Dict[str, Any]:
        """
        Separating slice Σ and the check that J⁻(O₃) ∩ Σ lies in
        K₁⊥ ∖ J⁺(K₂) with O₃ inside its domain of dependence.
        """
        k1 = config.alice.zone(self.lattice)
        k2 = config.bob.zone(self.lattice)
        o3 = config.charlie_region
        try:
            sigma = find_separating_slice(k1, k2, o3)
        except (NoSliceFound, GeometryViolation) as e:
            logger.debug(f"No separating slice for Sorkin geometry: {e}")
            return {"separating_slice": None, "slice_localization": None}
        base = causal_past(o3) & sigma.region()
        inside = base.issubset(causal_complement(k1)) and base.isdisjoint(causal_future(k2))
        covered = o3.issubset(domain_of_dependence(base))
        return {"separating_slice": list(sigma.levels), "slice_localization": bool(inside and covered)}

    def _provenance(self, config: SorkinConfig) -> Dict[str, Any]:
        return {"system_digest": self.spec.digest(), "seed": int(config.seed)}

    def run_sorkin(self, config: SorkinConfig) -> SignallingReport:
        """
        Tripartite no-signalling check with local probes.

        Raises:
            GeometryViolation: If a geometric hypothesis fails or a probe is
                flagged nonlocal
            LocalizationViolation: If C is not localizable in O₃
        """
        failed = self.sorkin_violations(config)
        for obs in (config.alice, config.bob):
            if obs.probe.nonlocal_:
                failed.append(f"probe of {obs.name!r} is flagged nonlocal")
        if failed:
            logger.warning(f"Sorkin hypotheses failed: {failed}")
            raise GeometryViolation(failed)

        c = self._charlie_operator(config)
        self._validate_charlie(config, c)

        value_ab, value_b, delta, operator_delta = self.evaluate_signalling(config)
        extra = self._slice_diagnostics(config)
        extra["charlie_mode"] = "local_observable" if config.charlie is None else "probe"
        report = SignallingReport(
            omega_AB_of_C=value_ab,
            omega_B_of_C=value_b,
            delta=delta,
            operator_delta=operator_delta,
            tolerance=config.tol,
            mode="local",
            provenance=self._provenance(config),
            extra=extra,
        )
        logger.info(f"Sorkin: delta={delta:.3e} operator_delta={operator_delta:.3e}")
        return report

    # ============================================================
    # ADVERSARY
    # ============================================================

    def adversary_violations(self, config: SorkinConfig) -> List[str]:
        """Requirements on the non-local Bob (empty if met)."""
        bob = config.bob
        k1 = config.alice.zone(self.lattice)
        failed = []
        if not bob.probe.nonlocal_:
            failed.append("Bob's probe is not flagged nonlocal")
        cells = [c.cell for c in bob.probe.couplings]
        bridged = any(a.t == b.t for a, b in combinations(cells, 2))
        if not bridged:
            failed.append("Bob does not couple at two spacelike cells of one layer")
        if not any(c in causal_future(k1) for c in cells):
            failed.append("no Bob cell lies in J+(K1)")
        if not any(c in causal_past(config.charlie_region) for c in cells):
            failed.append("no Bob cell lies in J-(O3)")
        if not are_spacelike(config.charlie_region, k1):
            failed.append("O3 is not spacelike to K1")
        return failed

    def _scaled_bob(self, bob: ObserverSpec, strength: float) -> ObserverSpec:
        probe = bob.probe
        couplings = []
        for coupling in probe.couplings:
            gate = Operator(coupling.gate, SlotLayout.of([("gate", len(coupling.gate))]))
            couplings.append(Coupling(coupling.cell, unitary_power(gate, strength).matrix))
        return bob.with_probe(probe.with_couplings(couplings))

    def run_adversary(self, config: AdversaryConfig) -> SignallingReport:
        """
        Search for a signalling witness of a non-local Bob.

        The given configuration is tried first; then up to `budget` seeded
        trials rescale Bob's gates by a strength λ in (0, 1] and draw a random
        pure product state.

        Raises:
            GeometryViolation: If Bob is not a bridging non-local probe
            NoWitnessFound: If no trial beats the threshold
        """
        failed = self.adversary_violations(config)
        if failed:
            logger.warning(f"Adversary requirements failed: {failed}")
            raise GeometryViolation(failed)

        threshold = config.threshold if config.threshold is not None else Config.get(Config.ADVERSARY_THRESHOLD)
        budget = config.budget if config.budget is not None else Config.get(Config.ADVERSARY_SEARCH_BUDGET)

        def _report(values, extra) -> SignallingReport:
            value_ab, value_b, delta, operator_delta = values
            return SignallingReport(
                omega_AB_of_C=value_ab,
                omega_B_of_C=value_b,
                delta=delta,
                operator_delta=operator_delta,
                tolerance=config.tol,
                mode="adversary",
                threshold=threshold,
                provenance=self._provenance(config),
                extra=extra,
            )

        best = _report(self.evaluate_signalling(config), {"witness": {"source": "config"}})
        if best.delta > threshold:
            logger.info(f"Adversary: configured witness signals, delta={best.delta:.3e}")
            return best

        for trial in range(budget):
            rng = make_rng(substream_seed(config.seed, "adversary", trial))
            strength = float(1.0 - rng.uniform(0.0, 1.0))
            omega = random_product_state(self.spec.layout, rng)
            bob = self._scaled_bob(config.bob, strength)
            candidate = _report(
                self.evaluate_signalling(config, omega=omega, bob=bob),
                {"witness": {
                    "source": "search",
                    "trial": trial,
                    "strength": strength,
                    "initial_state": omega.to_serializable(),
                }},
            )
            if candidate.delta > best.delta:
                best = candidate
            if candidate.delta > threshold:
                logger.info(f"Adversary: witness at trial {trial}, delta={candidate.delta:.3e}")
                return candidate

        logger.warning(f"Adversary search exhausted {budget} trials; best delta={best.delta:.3e}")
        raise NoWitnessFound(
            f"No signalling witness above {threshold} in {budget} trials (best delta {best.delta:.3e})",
            best_report=best,
        )

    # ============================================================
    # N OBSERVERS
    # ============================================================

    def _expectation_without(self, omega: Operator, observers: Sequence[ObserverSpec], target: str,
                             removed: Sequence[str]) -> float:
        kept = [o for o in observers if o.name not in set(removed)]
        return float(np.real(self.updates.n_observer_expectation(omega, kept, target)))

    def _induced_gap(self, config: Theorem2Config, target: ObserverSpec, spacelike: ObserverSpec) -> float:
        """
        ‖Tr_Y[(1⊗σ_Y) Θ_A(ε_B⊗1)] − Θ_{A∖Y}(ε_B⊗1)‖_F, A = observers preceding B.
        """
        observers = list(config.observers)
        order = self.updates.causal_order(observers)
        ranked = [observers[i] for i in order.indices]
        before = ranked[:[o.name for o in ranked].index(target.name)]
        if spacelike.name not in {o.name for o in before}:
            return 0.0

        theta_b = self.probes.scattering_operator([target.probe])
        induced = self.probes.induced_observable(theta_b, [target.probe], target.observable)

        full = self.probes.theta_apply(self.probes.scattering_operator([o.probe for o in before]), induced)
        sigma_y = spacelike.probe.initial_state
        reduced = partial_trace(apply_left(sigma_y, full), [spacelike.probe.slot])

        rest = [o.probe for o in before if o.name != spacelike.name]
        if rest:
            without = self.probes.theta_apply(self.probes.scattering_operator(rest), induced)
        else:
            without = induced
        return reduced.distance(embed(without, reduced.layout))

    def run_theorem2(self, config: Theorem2Config) -> SignallingReport:
        """
        Deleting observers spacelike to the target leaves its expectation fixed.

        Y is deleted first; then every further observer spacelike to B is
        deleted in turn, accumulating. delta is the largest shift seen.

        Raises:
            GeometryViolation: If K_B is disconnected (unless overridden) or
                Y is not spacelike to B
            NotOrderable: If the observers admit no causal order
        """
        observers = list(config.observers)
        by_name = {o.name: o for o in observers}
        target = by_name[config.target]
        spacelike = by_name[config.spacelike]
        k_b = target.zone(self.lattice)

        failed = []
        if not is_connected(causal_hull(k_b)):
            if config.allow_disconnected_target:
                logger.warning("Target coupling zone is disconnected; override is experimental")
            else:
                failed.append(f"coupling zone of {target.name!r} is not connected")
        if not are_spacelike(k_b, spacelike.zone(self.lattice)):
            failed.append(f"{spacelike.name!r} is not spacelike to {target.name!r}")
        if failed:
            logger.warning(f"N-observer hypotheses failed: {failed}")
            raise GeometryViolation(failed)

        omega = config.omega
        value_all = self._expectation_without(omega, observers, target.name, [])
        value_without = self._expectation_without(omega, observers, target.name, [spacelike.name])
        stages = [{"removed": [spacelike.name], "delta": abs(value_all - value_without)}]

        removed = [spacelike.name]
        for obs in observers:
            if obs.name in removed or obs.name == target.name:
                continue
            if are_spacelike(k_b, obs.zone(self.lattice)):
                removed.append(obs.name)
                value = self._expectation_without(omega, observers, target.name, removed)
                stages.append({"removed": list(removed), "delta": abs(value_all - value)})

        direct = self.updates.super_observer_expectation(omega, observers, target)
        operator_delta = self._induced_gap(config, target, spacelike)
        delta = max(stage["delta"] for stage in stages)

        report = SignallingReport(
            omega_AB_of_C=value_all,
            omega_B_of_C=value_without,
            delta=delta,
            operator_delta=operator_delta,
            tolerance=config.tol,
            mode="local",
            provenance={"system_digest": self.spec.digest(), "seed": int(config.seed)},
            extra={
                "successive_deletions": stages,
                "pipeline_gap": abs(value_all - direct),
                "order": [observers[i].name for i in self.updates.causal_order(observers).indices],
            },
        )
        logger.info(f"N-observer deletion: delta={delta:.3e} operator_delta={operator_delta:.3e}")
        return report

    # ============================================================
    # SPACELIKE PAIRS
    # ============================================================

    def check_spacelike_commutation(self, obs_a: ObserverSpec, obs_b: ObserverSpec, omega: Operator,
                                    effect_a: Optional[Operator] = None,
                                    tol: Optional[float] = None) -> CommutationReport:
        """
        Θ̂_A∘Θ̂_B = Θ̂_B∘Θ̂_A and the correlation criterion for spacelike A, B.

        Args:
            obs_a: Conditioning observer
            obs_b: Observer whose expectation is conditioned
            omega: Initial system state
            effect_a: Conditioning effect (defaults to A's observable)
            tol: Tolerance

        Raises:
            GeometryViolation: If the coupling zones are not spacelike
        """
        tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        k_a, k_b = obs_a.zone(self.lattice), obs_b.zone(self.lattice)
        if not are_spacelike(k_a, k_b):
            raise GeometryViolation([f"zones of {obs_a.name!r} and {obs_b.name!r} are not spacelike"])
        effect_a = obs_a.observable if effect_a is None else effect_a

        layout = self.probes.joint_layout([obs_a.probe, obs_b.probe])
        s_a = self.probes.extend_map(self.probes.scattering_operator([obs_a.probe]), layout).s_matrix
        s_b = self.probes.extend_map(self.probes.scattering_operator([obs_b.probe]), layout).s_matrix
        ab, ba = s_a @ s_b, s_b @ s_a
        deviation = 0.0
        for g in self.updates.generating_set(layout):
            left = ab.matrix @ g.matrix @ ab.matrix.conj().T
            right = ba.matrix @ g.matrix @ ba.matrix.conj().T
            deviation = max(deviation, float(np.linalg.norm(left - right)) / g.norm())

        conditional = self.updates.conditional_expectation(omega, obs_a, effect_a, obs_b)
        unconditional = self.updates.super_observer_expectation(omega, [obs_a, obs_b], obs_b)

        eps_a = self.probes.induced_observable(self.probes.scattering_operator([obs_a.probe]), [obs_a.probe], effect_a)
        eps_b = self.probes.induced_observable(self.probes.scattering_operator([obs_b.probe]), [obs_b.probe],
                                               obs_b.observable)
        joint = float(omega.expectation(eps_a @ eps_b).real)
        product = float(omega.expectation(eps_a).real) * float(omega.expectation(eps_b).real)

        updated = self.updates.nonselective_update(omega, obs_a)
        marginal_shift = float(updated.expectation(eps_b).real) - float(omega.expectation(eps_b).real)

        report = CommutationReport(
            commutation_deviation=deviation,
            conditional=float(np.real(conditional)),
            unconditional=float(np.real(unconditional)),
            product_of_marginals=product,
            joint=joint,
            marginal_shift=marginal_shift,
            tolerance=tol,
        )
        logger.info(
            f"Spacelike pair {obs_a.name}/{obs_b.name}: commutation={deviation:.3e} "
            f"shift={report.conditioning_shift:.3e} correlation={report.correlation:.3e}"
        )
        return report
