# fv_system/services/oracle_service.py
"""
Independent Schrödinger-picture simulation.

Builds full unitaries with np.kron and axis permutations instead of the
local-gate kernels, evolves ρ⊗σ forward through the coupled circuit, reads
the probe out and traces it away. Used to pin the orientation of S.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fv_system.errors import ZeroProbability
from fv_system.models.operator import Operator
from fv_system.models.reports import OracleReport
from fv_system.models.specs import ObserverSpec, SystemSpec

logger = logging.getLogger(__name__)


def _lift(local: np.ndarray, positions: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Full matrix of `local` acting on tensor factors `positions`."""
    n = len(dims)
    rest = [i for i in range(n) if i not in positions]
    order = list(positions) + rest
    rest_dim = int(np.prod([dims[i] for i in rest])) if rest else 1
    big = np.kron(local, np.eye(rest_dim))
    shape = [dims[i] for i in order]
    big = big.reshape(shape + shape)
    inverse = list(np.argsort(order))
    big = big.transpose(inverse + [n + i for i in inverse])
    total = int(np.prod(dims))
    return big.reshape(total, total)


def _trace_out(matrix: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Trace away every factor after the first `keep` factors."""
    kept = int(np.prod(dims[:keep]))
    dropped = int(np.prod(dims[keep:])) if len(dims) > keep else 1
    return np.einsum("ajbj->ab", matrix.reshape(kept, dropped, kept, dropped))


class SchrodingerOracle:
    """Direct forward simulation of the coupled circuit, system sites first."""

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.lattice = spec.lattice

    def _dims(self, observers: Sequence[ObserverSpec]) -> List[int]:
        return [self.spec.site_dim] * self.lattice.width + [o.probe.dim for o in observers]

    def _free_layer(self, t: int, dims: Sequence[int]) -> np.ndarray:
        u = np.eye(int(np.prod(dims)), dtype=np.complex128)
        for left, gate in self.spec.layer_gates[t]:
            u = _lift(gate, [left, left + 1], dims) @ u
        return u

    def circuits(self, observers: Sequence[ObserverSpec]) -> Tuple[np.ndarray, np.ndarray]:
        """(U_coupled, U_free ⊗ 1) over the full depth."""
        dims = self._dims(observers)
        width = self.lattice.width
        total = int(np.prod(dims))
        coupled = np.eye(total, dtype=np.complex128)
        free = np.eye(total, dtype=np.complex128)
        for t in range(self.lattice.depth):
            entries = []
            for k, obs in enumerate(observers):
                for coupling in obs.probe.couplings:
                    if coupling.cell.t == t:
                        entries.append((obs.probe.probe_id, coupling.cell.x, width + k, coupling.gate))
            for _, x, slot, gate in sorted(entries, key=lambda e: (e[0], e[1])):
                coupled = _lift(gate, [x, slot], dims) @ coupled
            layer = self._free_layer(t, dims)
            coupled = layer @ coupled
            free = layer @ free
        return coupled, free

    def _joint_state(self, omega: Operator, observers: Sequence[ObserverSpec]) -> np.ndarray:
        rho = omega.matrix
        for obs in observers:
            rho = np.kron(rho, obs.probe.initial_state.matrix)
        return rho

    def _readout(self, observers: Sequence[ObserverSpec], target: int, local: np.ndarray) -> np.ndarray:
        dims = self._dims(observers)
        return _lift(local, [self.lattice.width + target], dims)

    def expectation(self, omega: Operator, observers: Sequence[ObserverSpec], target: int = 0,
                    observable: Optional[Operator] = None) -> float:
        """Tr[U_c (ρ⊗σ) U_c† (1⊗O)] for observer `target`."""
        coupled, _ = self.circuits(observers)
        rho = coupled @ self._joint_state(omega, observers) @ coupled.conj().T
        o = observers[target].observable if observable is None else observable
        return float(np.trace(rho @ self._readout(observers, target, o.matrix)).real)

    def nonselective_update(self, omega: Operator, observers: Sequence[ObserverSpec]) -> np.ndarray:
        """U_f† Tr_P[U_c (ρ⊗σ) U_c†] U_f."""
        coupled, free = self.circuits(observers)
        rho = coupled @ self._joint_state(omega, observers) @ coupled.conj().T
        rho = free.conj().T @ rho @ free
        return _trace_out(rho, self._dims(observers), self.lattice.width)

    def selective_update(self, omega: Operator, observers: Sequence[ObserverSpec],
                         effects: Sequence[Operator]) -> Tuple[np.ndarray, float]:
        """Post-selection on E_1 ⊗ E_2 ⊗ ... after the coupled evolution."""
        coupled, free = self.circuits(observers)
        dims = self._dims(observers)
        rho = coupled @ self._joint_state(omega, observers) @ coupled.conj().T
        root = np.eye(len(rho), dtype=np.complex128)
        for k, effect in enumerate(effects):
            w, v = np.linalg.eigh((effect.matrix + effect.matrix.conj().T) / 2)
            local = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
            root = self._readout(observers, k, local) @ root
        p = float(np.trace(root @ rho @ root.conj().T).real)
        if p <= Config.get(Config.ZERO_PROBABILITY):
            raise ZeroProbability(f"Oracle success probability {p:.3e}")
        rho = free.conj().T @ (root @ rho @ root.conj().T) @ free / p
        return _trace_out(rho, dims, self.lattice.width), p

    def compare(self, updates, omega: Operator, observers: Sequence[ObserverSpec],
                effects: Optional[Sequence[Operator]] = None) -> OracleReport:
        """
        Deviations between the UpdateService formulas and this simulation.

        Args:
            updates: UpdateService on the same system
            omega: Initial system state
            observers: Observers coupled together
            effects: One effect per observer for the selective comparison
        """
        expectation_gap = 0.0
        for k, obs in enumerate(observers):
            pipeline = updates.super_observer_expectation(omega, observers, obs)
            direct = self.expectation(omega, observers, k)
            expectation_gap = max(expectation_gap, abs(float(np.real(pipeline)) - direct))

        state, _ = updates.super_observer_update(omega, observers)
        nonselective_gap = float(np.linalg.norm(state.matrix - self.nonselective_update(omega, observers)))

        selective_gap = 0.0
        if effects:
            named = {o.name: e for o, e in zip(observers, effects)}
            state, p = updates.super_observer_update(omega, observers, named)
            direct, q = self.selective_update(omega, observers, effects)
            selective_gap = max(float(np.linalg.norm(state.matrix - direct)), abs(p - q))

        report = OracleReport(
            expectation_gap=expectation_gap,
            nonselective_gap=nonselective_gap,
            selective_gap=selective_gap,
            tolerance=Config.get(Config.PHYSICS_TOLERANCE),
        )
        logger.debug(f"Oracle comparison: {report.deviations()}")
        return report
