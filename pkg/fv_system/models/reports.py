# fv_system/models/reports.py
"""Result records produced by the verification services."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class Lemma1Report:
    """Localisation check of a scattering map against its coupling zone."""
    max_trivial_deviation: float = 0.0  # (i) generators spacelike to K
    max_localization_deviation: float = 0.0  # (ii) out-region generators vs in-region commutant
    trivial_trials: int = 0
    localization_trials: int = 0
    skipped: int = 0  # out-region cells outside D(N-)
    tolerance: float = 0.0
    witness: Optional[Dict[str, Any]] = None  # worst generator seen

    @property
    def passed(self) -> bool:
        return (self.max_trivial_deviation <= self.tolerance
                and self.max_localization_deviation <= self.tolerance)

    def deviations(self) -> Dict[str, float]:
        return {
            "trivial_action": self.max_trivial_deviation,
            "localization": self.max_localization_deviation,
        }

    def details(self) -> Dict[str, Any]:
        return {
            "trivial_trials": self.trivial_trials,
            "localization_trials": self.localization_trials,
            "skipped": self.skipped,
            "witness": self.witness,
        }


@dataclass
class FactorisationReport:
    """Super-observer Θ against the ordered composition of individual Θ's."""
    max_deviation: float
    generators_checked: int
    order: tuple
    tolerance: float
    forced: bool = False

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def deviations(self) -> Dict[str, float]:
        return {"factorisation": self.max_deviation}

    def details(self) -> Dict[str, Any]:
        return {
            "generators_checked": self.generators_checked,
            "order": list(self.order),
            "forced": self.forced,
        }


@dataclass
class SignallingReport:
    """
    No-signalling comparison.

    In local mode the check passes iff both deltas are within tolerance; in
    adversary mode it passes iff delta exceeds the demonstration threshold.
    """
    omega_AB_of_C: float
    omega_B_of_C: float
    delta: float
    operator_delta: float
    tolerance: float
    mode: str = "local"
    threshold: float = 0.0
    provenance: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.mode == "adversary":
            return self.delta > self.threshold
        return self.delta <= self.tolerance and self.operator_delta <= self.tolerance

    def deviations(self) -> Dict[str, float]:
        return {"delta": self.delta, "operator_delta": self.operator_delta}

    def details(self) -> Dict[str, Any]:
        out = {
            "omega_AB_of_C": self.omega_AB_of_C,
            "omega_B_of_C": self.omega_B_of_C,
            "mode": self.mode,
            "provenance": self.provenance,
        }
        if self.mode == "adversary":
            out["threshold"] = self.threshold
        out.update(self.extra)
        return out


@dataclass
class CommutationReport:
    """Spacelike commutation of two scattering maps and the correlation criterion."""
    commutation_deviation: float
    conditional: float
    unconditional: float
    product_of_marginals: float
    joint: float
    marginal_shift: float  # ω_A(ε_B(O_B)) − ω(ε_B(O_B))
    tolerance: float

    @property
    def conditioning_shift(self) -> float:
        return abs(self.conditional - self.unconditional)

    @property
    def correlation(self) -> float:
        return abs(self.joint - self.product_of_marginals)

    @property
    def criterion_holds(self) -> bool:
        """Conditioning is inert iff the induced observables are uncorrelated."""
        inert = self.conditioning_shift <= self.tolerance
        uncorrelated = self.correlation <= self.tolerance
        return inert == uncorrelated

    @property
    def passed(self) -> bool:
        return (self.commutation_deviation <= self.tolerance
                and abs(self.marginal_shift) <= self.tolerance
                and self.criterion_holds)

    def deviations(self) -> Dict[str, float]:
        return {
            "commutation": self.commutation_deviation,
            "marginal_shift": abs(self.marginal_shift),
        }

    def details(self) -> Dict[str, Any]:
        return {
            "conditional": self.conditional,
            "unconditional": self.unconditional,
            "joint": self.joint,
            "product_of_marginals": self.product_of_marginals,
            "conditioning_shift": self.conditioning_shift,
            "correlation": self.correlation,
            "criterion_holds": self.criterion_holds,
        }


@dataclass
class OracleReport:
    """Gaps between the Heisenberg-side formulas and direct forward simulation."""
    expectation_gap: float
    nonselective_gap: float
    selective_gap: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.expectation_gap, self.nonselective_gap, self.selective_gap) <= self.tolerance

    def deviations(self) -> Dict[str, float]:
        return {
            "expectation": self.expectation_gap,
            "nonselective_update": self.nonselective_gap,
            "selective_update": self.selective_gap,
        }

    def details(self) -> Dict[str, Any]:
        return {}


@dataclass
class TrialResult:
    """One seeded trial of a campaign check."""
    index: int
    seed: int
    passed: bool
    deviations: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)


@dataclass
class CampaignReport:
    """Trials of one check, ordered by trial index."""
    check: str
    seed: int
    trials: List[TrialResult]
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.trials) and all(t.passed for t in self.trials)

    @property
    def passed_count(self) -> int:
        return sum(1 for t in self.trials if t.passed)

    def deviations(self) -> Dict[str, float]:
        """Worst value of every deviation across trials."""
        worst: Dict[str, float] = {}
        for trial in self.trials:
            for key, value in trial.deviations.items():
                worst[key] = max(worst.get(key, 0.0), value)
        return worst

    def details(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "trials": len(self.trials),
            "passed_trials": self.passed_count,
            "per_trial": [
                {
                    "index": t.index,
                    "seed": t.seed,
                    "passed": t.passed,
                    "deviations": t.deviations,
                    **({"details": t.details} if t.details else {}),
                }
                for t in self.trials
            ],
        }


@dataclass
class CheckResult:
    """One named check as it appears in a run report."""
    name: str
    passed: bool
    deviations: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_report(cls, name: str, report: Any) -> "CheckResult":
        """Any report exposing passed, deviations() and details()."""
        return cls(name, bool(report.passed), dict(report.deviations()), dict(report.details()))
