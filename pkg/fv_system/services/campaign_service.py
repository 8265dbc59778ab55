# fv_system/services/campaign_service.py
"""
Randomized verification campaigns.

Each check draws a fresh random configuration per trial from the substream
seed substream_seed(seed, check, index). Trials run in worker threads under
a semaphore and are reduced in index order, so reports do not depend on
scheduling.
"""
import asyncio
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fv_system.causal import are_spacelike, enumerate_causal_orders
from fv_system.errors import FVError
from fv_system.events import VerificationEvents, event_bus
from fv_system.models.lattice import Cell, Lattice, Region
from fv_system.models.operator import SlotLayout
from fv_system.models.reports import CampaignReport, TrialResult
from fv_system.models.specs import (
    Coupling,
    LocalObservable,
    ObserverSpec,
    ProbeSpec,
    SorkinConfig,
    SystemSpec,
    Theorem2Config,
    probe_slot,
)
from fv_system.qop.algebra import commutator_norm
from fv_system.qop.random_ops import (
    make_rng,
    random_density,
    random_effect,
    random_hermitian,
    random_pure_state,
    random_unitary,
    substream_seed,
)
from fv_system.qop.validator import is_density, min_eigenvalue
from fv_system.services.circuit_service import CircuitService
from fv_system.services.oracle_service import SchrodingerOracle
from fv_system.services.probe_service import ProbeService
from fv_system.services.protocol_service import ProtocolService
from fv_system.services.update_service import UpdateService

logger = logging.getLogger(__name__)

CAMPAIGN_WIDTH = 5
CAMPAIGN_DEPTH = 4
CAMPAIGN_SITE_DIM = 2
CAMPAIGN_PROBE_DIM = 2

# Sorkin geometry: Bob inside J-(O3), O3 spacelike to Alice
SORKIN_ALICE = [(0, 0)]
SORKIN_BOB = [(2, 1), (2, 2)]
SORKIN_CHARLIE = [(4, 2), (4, 3)]

# N-observer geometry: target zone {(1,2),(1,3)}; Y drawn from cells spacelike to it
THEOREM2_FIRST = [(1, 0)]
THEOREM2_TARGET = [(1, 2), (1, 3)]
THEOREM2_LAST = [(0, 3)]
THEOREM2_SPACELIKE_CELLS = [(4, 1), (4, 2), (4, 3), (3, 2), (3, 3)]

CHECKS = ("sorkin", "oracle", "lemma1", "factorisation", "theorem2", "updates", "lightcone")


# ═══════════════════════════════════════════════════════════════════════════
# RANDOM CONFIGURATIONS
# ═══════════════════════════════════════════════════════════════════════════

def random_system(rng: np.random.Generator) -> SystemSpec:
    lattice = Lattice(CAMPAIGN_WIDTH, CAMPAIGN_DEPTH)
    return SystemSpec.random(lattice, CAMPAIGN_SITE_DIM, rng)


def random_observer(name: str, cells: Sequence[Tuple[int, int]], rng: np.random.Generator,
                    site_dim: int = CAMPAIGN_SITE_DIM, dim: int = CAMPAIGN_PROBE_DIM,
                    with_effect: bool = True) -> ObserverSpec:
    """Observer with Haar coupling gates, a random pure probe state and a random effect."""
    layout = SlotLayout.of([(probe_slot(name), dim)])
    couplings = tuple(Coupling(Cell.of(c), random_unitary(site_dim * dim, rng).matrix) for c in cells)
    probe = ProbeSpec(name, dim, random_pure_state(dim, rng, layout), couplings)
    observable = random_effect(dim, rng, layout) if with_effect else random_hermitian(dim, rng, layout)
    return ObserverSpec(name, probe, observable)


def random_worldline(lattice: Lattice, rng: np.random.Generator, max_length: int = 2,
                     start: Optional[Cell] = None) -> List[Cell]:
    """Timelike chain of cells, one per layer, moving at most one site per step."""
    if start is None:
        start = Cell(int(rng.integers(lattice.width)), int(rng.integers(lattice.depth)))
    cells = [start]
    length = int(rng.integers(1, max_length + 1))
    while len(cells) < length and cells[-1].t + 1 < lattice.depth:
        last = cells[-1]
        x = int(np.clip(last.x + int(rng.integers(-1, 2)), 0, lattice.width - 1))
        cells.append(Cell(x, last.t + 1))
    return cells


def _distinct_cells(lattice: Lattice, rng: np.random.Generator, count: int) -> List[Cell]:
    all_cells = list(lattice.cells())
    picks = rng.choice(len(all_cells), size=count, replace=False)
    return [all_cells[int(i)] for i in picks]


def _ordered_observers(lattice: Lattice, rng: np.random.Generator, count: int) -> List[ObserverSpec]:
    """`count` observers listed in a valid causal order."""
    starts = sorted(_distinct_cells(lattice, rng, count), key=lambda c: (c.t, c.x))
    worldlines = [random_worldline(lattice, rng, start=s) for s in starts]
    orders = enumerate_causal_orders([Region.of(lattice, w) for w in worldlines])
    if orders:
        worldlines = [worldlines[i] for i in orders[0].indices]
    else:
        worldlines = [[s] for s in starts]
    return [
        random_observer(f"P{k}", [c.to_pair() for c in w], rng)
        for k, w in enumerate(worldlines)
    ]


# ═══════════════════════════════════════════════════════════════════════════
# TRIALS
# ═══════════════════════════════════════════════════════════════════════════

def sorkin_trial(index: int, seed: int, tol: float) -> TrialResult:
    """Random gates, probes and state on the fixed tripartite geometry."""
    rng = make_rng(seed)
    system = random_system(rng)
    lattice = system.lattice
    alice = random_observer("alice", SORKIN_ALICE, rng)
    bob = random_observer("bob", SORKIN_BOB, rng)
    o3 = Region.of(lattice, SORKIN_CHARLIE)
    omega = random_density(system.layout.total_dim, rng, system.layout)
    circuit = CircuitService(system)
    if index % 2 == 0:
        cell = SORKIN_CHARLIE[int(rng.integers(len(SORKIN_CHARLIE)))]
        site_op = random_hermitian(system.site_dim, rng).matrix
        c = LocalObservable(circuit.local_observable(site_op, cell).op, o3)
        config = SorkinConfig(system, alice, bob, o3, omega, charlie_observable=c, tol=tol, seed=seed)
    else:
        charlie = random_observer("charlie", [SORKIN_CHARLIE[0]], rng)
        config = SorkinConfig(system, alice, bob, o3, omega, charlie=charlie, tol=tol, seed=seed)
    report = ProtocolService(system).run_sorkin(config)
    return TrialResult(index, seed, report.passed, report.deviations(),
                       {"charlie_mode": report.extra.get("charlie_mode")})


def oracle_trial(index: int, seed: int, tol: float) -> TrialResult:
    """One or two random probes compared against forward simulation."""
    rng = make_rng(seed)
    system = random_system(rng)
    observers = _ordered_observers(system.lattice, rng, 1 + index % 2)
    omega = random_density(system.layout.total_dim, rng, system.layout)
    updates = UpdateService(system)
    report = SchrodingerOracle(system).compare(updates, omega, observers,
                                               [o.observable for o in observers])
    passed = max(report.deviations().values()) <= tol
    return TrialResult(index, seed, passed, report.deviations())


def lemma1_trial(index: int, seed: int, tol: float, generators: int = 12) -> TrialResult:
    """Localisation of one random local probe's scattering map."""
    rng = make_rng(seed)
    system = random_system(rng)
    probe = _ordered_observers(system.lattice, rng, 1)[0].probe
    probes = ProbeService(system)
    theta = probes.scattering_operator([probe])
    report = probes.check_lemma1(theta, probe.zone(system.lattice), trials=generators,
                                 seed=substream_seed(seed, "generators"), tol=tol)
    return TrialResult(index, seed, report.passed, report.deviations(), {"skipped": report.skipped})


def factorisation_trial(index: int, seed: int, tol: float) -> TrialResult:
    """Two or three ordered probes: super-circuit against the ordered product."""
    rng = make_rng(seed)
    system = random_system(rng)
    observers = _ordered_observers(system.lattice, rng, 2 + index % 2)
    updates = UpdateService(system)
    report = updates.check_causal_factorisation(observers, tol=tol)
    deviations = dict(report.deviations())

    zones = [o.zone(system.lattice) for o in observers]
    if len(observers) == 2 and are_spacelike(*zones):
        swapped = updates.check_causal_factorisation(observers, order=[observers[1].name, observers[0].name],
                                                     tol=tol)
        deviations["reversed_order"] = swapped.max_deviation
    passed = max(deviations.values()) <= tol
    return TrialResult(index, seed, passed, deviations, {"order": list(report.order)})


def theorem2_trial(index: int, seed: int, tol: float) -> TrialResult:
    """Four observers; the one spacelike to the target is deleted."""
    rng = make_rng(seed)
    system = random_system(rng)
    y_cell = THEOREM2_SPACELIKE_CELLS[int(rng.integers(len(THEOREM2_SPACELIKE_CELLS)))]
    observers = (
        random_observer("A", THEOREM2_FIRST, rng),
        random_observer("Y", [y_cell], rng),
        random_observer("B", THEOREM2_TARGET, rng),
        random_observer("C", THEOREM2_LAST, rng),
    )
    omega = random_density(system.layout.total_dim, rng, system.layout)
    config = Theorem2Config(system, observers, "B", "Y", omega, tol=tol, seed=seed)
    report = ProtocolService(system).run_theorem2(config)
    deviations = dict(report.deviations())
    deviations["pipeline_gap"] = float(report.extra["pipeline_gap"])
    passed = report.passed and deviations["pipeline_gap"] <= tol
    return TrialResult(index, seed, passed, deviations, {"spacelike_cell": list(y_cell)})


def updates_trial(index: int, seed: int, tol: float) -> TrialResult:
    """Trace and positivity of updates; selective chain against single-shot post-selection."""
    rng = make_rng(seed)
    system = random_system(rng)
    observers = _ordered_observers(system.lattice, rng, 2)
    omega = random_density(system.layout.total_dim, rng, system.layout)
    updates = UpdateService(system)

    state = updates.nonselective_update(omega, observers[0])
    trace_gap = abs(state.trace() - 1.0)
    negativity = max(0.0, -min_eigenvalue(state))

    effects = [o.observable for o in observers]
    chained, p_chain = updates.compose_selective(omega, observers, effects)
    joint, p_joint = updates.super_observer_update(omega, observers, {o.name: o.observable for o in observers})
    chain_gap = max(chained.distance(joint), abs(p_chain - p_joint))

    deviations = {"trace": trace_gap, "negativity": negativity, "selective_chain": chain_gap}
    passed = (trace_gap <= tol and chain_gap <= tol
              and is_density(state, Config.get(Config.PHYSICS_TOLERANCE)).is_valid)
    return TrialResult(index, seed, passed, deviations)


def lightcone_trial(index: int, seed: int, tol: float) -> TrialResult:
    """Heisenberg support stays inside the past cone; spacelike pullbacks commute."""
    rng = make_rng(seed)
    system = random_system(rng)
    lattice = system.lattice
    circuit = CircuitService(system)
    p, q = _distinct_cells(lattice, rng, 2)
    a = circuit.heisenberg_pullback(random_hermitian(system.site_dim, rng).matrix, p.x, p.t)
    b = circuit.heisenberg_pullback(random_hermitian(system.site_dim, rng).matrix, q.x, q.t)
    cone = set(range(max(0, p.x - p.t), min(lattice.width, p.x + p.t + 1)))
    excess = float(len(circuit.support_of(a, tol) - cone))
    deviations = {"support_excess": excess}
    spacelike = are_spacelike(Region.of(lattice, [p]), Region.of(lattice, [q]))
    if spacelike:
        deviations["spacelike_commutator"] = commutator_norm(a, b) / (a.norm() * b.norm())
    passed = excess == 0 and deviations.get("spacelike_commutator", 0.0) <= tol
    return TrialResult(index, seed, passed, deviations, {"cells": [p.to_pair(), q.to_pair()]})


TRIALS: Dict[str, Callable[[int, int, float], TrialResult]] = {
    "sorkin": sorkin_trial,
    "oracle": oracle_trial,
    "lemma1": lemma1_trial,
    "factorisation": factorisation_trial,
    "theorem2": theorem2_trial,
    "updates": updates_trial,
    "lightcone": lightcone_trial,
}


# ═══════════════════════════════════════════════════════════════════════════
# CAMPAIGN RUNNER
# ═══════════════════════════════════════════════════════════════════════════

class CampaignService:
    """Concurrent fan-out of seeded trials with an ordered reduction."""

    def __init__(self, seed: int, tol: Optional[float] = None, workers: Optional[int] = None):
        self.seed = int(seed)
        self.tol = Config.get(Config.PHYSICS_TOLERANCE) if tol is None else tol
        self.workers = workers or Config.get(Config.CAMPAIGN_WORKERS)

    def _trial(self, check: str, index: int) -> TrialResult:
        seed = substream_seed(self.seed, check, index)
        try:
            return TRIALS[check](index, seed, self.tol)
        except FVError as e:
            logger.warning(f"Trial {check}[{index}] raised {type(e).__name__}: {e}")
            return TrialResult(index, seed, False, {}, {"error": f"{type(e).__name__}: {e}"})

    async def run_check(self, check: str, trials: int) -> CampaignReport:
        """
        Run `trials` seeded trials of one check.

        Raises:
            KeyError: If the check name is unknown
        """
        if check not in TRIALS:
            raise KeyError(f"Unknown campaign check {check!r}; choose from {list(CHECKS)}")

        semaphore = asyncio.Semaphore(self.workers)
        await event_bus.emit(VerificationEvents.CAMPAIGN_STARTED,
                             {"check": check, "trials": trials, "seed": self.seed})

        async def _one(index: int) -> TrialResult:
            async with semaphore:
                result = await asyncio.to_thread(self._trial, check, index)
            event = VerificationEvents.TRIAL_COMPLETED if result.passed else VerificationEvents.TRIAL_FAILED
            await event_bus.emit(event, {
                "check": check,
                "index": index,
                "passed": result.passed,
                "max_deviation": result.max_deviation(),
                "reason": result.details.get("error") or result.deviations,
            })
            return result

        results = await asyncio.gather(*(_one(i) for i in range(trials)))
        report = CampaignReport(check, self.seed, sorted(results, key=lambda r: r.index), self.tol)

        await event_bus.emit(VerificationEvents.CAMPAIGN_FINISHED, {
            "check": check,
            "trials": trials,
            "passed": report.passed_count,
            "worst": max(report.deviations().values(), default=0.0),
        })
        return report

    async def run(self, checks: Sequence[str], trials: int) -> List[CampaignReport]:
        """Checks run one after another; trials within a check run concurrently."""
        reports = []
        for check in checks:
            reports.append(await self.run_check(check, trials))
        return reports
