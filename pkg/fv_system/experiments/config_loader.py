# fv_system/experiments/config_loader.py
"""
Load experiment configs: JSON → schema → physics.

Every stage reports all problems it finds at once, each tagged with the
JSON pointer of the offending value.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from config import Config
from fv_system.config.presets import gate_preset, observable_preset, preset_span, state_preset
from fv_system.errors import FVError, ParseError, PhysicsValidationError, SchemaError
from fv_system.experiments.config_schema import ExperimentConfig, MatrixSpec
from fv_system.models.lattice import Cell, Lattice, Region
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout
from fv_system.models.specs import (
    Coupling,
    LocalObservable,
    ObserverSpec,
    ProbeSpec,
    SystemSpec,
    probe_slot,
    site_slot,
)
from fv_system.qop.algebra import reorder, tensor
from fv_system.qop.random_ops import random_density, random_product_state, substream_seed
from fv_system.qop.validator import is_density, is_effect, is_hermitian, is_unitary
from fv_system.services.circuit_service import CircuitService

logger = logging.getLogger(__name__)

Violation = Tuple[str, str]

# Experiments that need each field
_NEEDS_SYSTEM = ("sorkin", "adversary", "theorem2", "factorisation", "spacelike", "lemma1")
_NEEDS_STATE = ("sorkin", "adversary", "theorem2", "spacelike")


@dataclass
class Experiment:
    """A parsed config together with the domain objects it describes."""
    config: ExperimentConfig
    digest: str
    system: Optional[SystemSpec] = None
    omega: Optional[DensityState] = None
    observers: Dict[str, ObserverSpec] = field(default_factory=dict)
    charlie_region: Optional[Region] = None
    charlie_observable: Optional[LocalObservable] = None
    conditioning_effect: Optional[Effect] = None

    def observer_list(self) -> List[ObserverSpec]:
        return list(self.observers.values())


def json_pointer(loc: Tuple[Union[str, int], ...]) -> str:
    """RFC 6901 pointer for a pydantic error location."""
    if not loc:
        return "/"
    parts = [str(p).replace("~", "~0").replace("/", "~1") for p in loc]
    return "/" + "/".join(parts)


def config_digest(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ═══════════════════════════════════════════════════════════════════════════
# STAGES 1-2: JSON AND SCHEMA
# ═══════════════════════════════════════════════════════════════════════════

def _read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Cannot read config {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Config {path} is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}")


def validate_schema(raw: Any) -> ExperimentConfig:
    """
    Raises:
        SchemaError: With one (pointer, message) pair per pydantic error
    """
    if not isinstance(raw, dict):
        raise SchemaError("Config must be a JSON object", [("/", f"got {type(raw).__name__}")])
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        violations = [(json_pointer(err["loc"]), err["msg"]) for err in e.errors()]
        raise SchemaError("Config does not match the schema", violations)


def _check_references(config: ExperimentConfig) -> List[Violation]:
    """Cross-field requirements per experiment."""
    failed: List[Violation] = []
    kind = config.experiment
    names = [o.name for o in config.observers]
    for i, name in enumerate(names):
        if names.index(name) != i:
            failed.append((f"/observers/{i}/name", f"duplicate observer name {name!r}"))

    def _require(field_name: str, value: Any) -> None:
        if value is None or value == []:
            failed.append((f"/{field_name}", f"required for experiment {kind!r}"))

    def _known(pointer: str, name: Optional[str]) -> None:
        if name is not None and name not in names:
            failed.append((pointer, f"unknown observer {name!r}"))

    if kind in _NEEDS_SYSTEM:
        _require("system", config.system)
    if kind in _NEEDS_STATE:
        _require("initial_state", config.initial_state)
    if kind in ("sorkin", "adversary"):
        _require("alice", config.alice)
        _require("bob", config.bob)
        _require("charlie", config.charlie)
        _known("/alice", config.alice)
        _known("/bob", config.bob)
        if config.charlie is not None:
            _known("/charlie/observer", config.charlie.observer)
    if kind == "theorem2":
        _require("target", config.target)
        _require("spacelike", config.spacelike)
        _known("/target", config.target)
        _known("/spacelike", config.spacelike)
    if kind == "spacelike":
        _require("pair", config.pair)
        if config.pair is not None:
            _known("/pair/0", config.pair[0])
            _known("/pair/1", config.pair[1])
    if kind in ("factorisation", "lemma1"):
        _require("observers", config.observers)
    if kind == "factorisation" and config.order is not None:
        for i, name in enumerate(config.order):
            _known(f"/order/{i}", name)
    if kind == "campaign":
        _require("checks", config.checks)
        if config.trials < 1:
            failed.append(("/trials", "campaign needs at least one trial"))
    return failed


# ═══════════════════════════════════════════════════════════════════════════
# STAGE 3: PHYSICS
# ═══════════════════════════════════════════════════════════════════════════

class _PhysicsBuilder:
    """Builds domain objects, collecting violations instead of stopping at the first."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.tol = config.tolerance
        self.violations: List[Violation] = []

    def _fail(self, pointer: str, message: str) -> None:
        self.violations.append((pointer, message))

    def _inline(self, rows: List[List[Tuple[float, float]]], pointer: str, dim: int) -> Optional[np.ndarray]:
        if len(rows) != dim or any(len(row) != dim for row in rows):
            self._fail(f"{pointer}/matrix", f"expected a {dim}x{dim} matrix")
            return None
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)

    def gate(self, spec: MatrixSpec, pointer: str, d_left: int, d_right: int) -> Optional[np.ndarray]:
        dim = d_left * d_right
        if spec.matrix is not None:
            matrix = self._inline(spec.matrix, pointer, dim)
        else:
            if d_left != d_right:
                self._fail(f"{pointer}/preset", "gate presets need equal dimensions on both factors")
                return None
            params = {k: v for k, v in (("angle", spec.angle), ("phase", spec.phase)) if v is not None}
            try:
                matrix = gate_preset(spec.preset, d_left, **params)
            except (ValueError, TypeError, FVError) as e:
                self._fail(f"{pointer}/preset", f"bad gate preset {spec.preset!r}: {e}")
                return None
        if matrix is None:
            return None
        check = is_unitary(Operator(matrix, SlotLayout.of([("gate", dim)])), self.tol)
        if not check.is_valid:
            self._fail(pointer, f"gate is not unitary: {check.details}")
            return None
        return matrix

    def single(self, spec: MatrixSpec, pointer: str, dim: int, contract: str) -> Optional[np.ndarray]:
        """Single-slot state ("density"), observable ("hermitian") or effect ("effect")."""
        if spec.matrix is not None:
            matrix = self._inline(spec.matrix, pointer, dim)
        else:
            try:
                if contract == "density":
                    if preset_span(spec.preset) != 1:
                        self._fail(f"{pointer}/preset", f"{spec.preset!r} is not a single-slot state")
                        return None
                    matrix = state_preset(spec.preset, dim)
                else:
                    matrix = observable_preset(spec.preset, dim)
            except (ValueError, FVError) as e:
                self._fail(f"{pointer}/preset", f"bad preset {spec.preset!r}: {e}")
                return None
        if matrix is None:
            return None
        op = Operator(matrix, SlotLayout.of([("slot", dim)]))
        checker = {"density": is_density, "hermitian": is_hermitian, "effect": is_effect}[contract]
        check = checker(op, self.tol)
        if not check.is_valid:
            self._fail(pointer, f"not a valid {contract} operator: {check.details}")
            return None
        return matrix

    def system(self) -> Optional[SystemSpec]:
        cfg = self.config.system
        lattice = Lattice(cfg.width, cfg.depth)
        try:
            if cfg.random_gates:
                return SystemSpec.random(lattice, cfg.site_dim, substream_seed(self.config.seed, "system"))
            gate = self.gate(cfg.gate, "/system/gate", cfg.site_dim, cfg.site_dim)
            return None if gate is None else SystemSpec.uniform(lattice, cfg.site_dim, gate)
        except FVError as e:
            self._fail("/system", str(e))
            return None

    def initial_state(self, system: SystemSpec) -> Optional[DensityState]:
        cfg = self.config.initial_state
        layout = system.layout
        d, width = system.site_dim, system.lattice.width
        seed = substream_seed(self.config.seed, "initial_state")
        if cfg.random == "pure_product":
            return random_product_state(layout, seed)
        if cfg.random == "mixed":
            return random_density(layout.total_dim, seed, layout)
        if cfg.matrix is not None:
            matrix = self._inline(cfg.matrix, "/initial_state", layout.total_dim)
            if matrix is None:
                return None
            op = Operator(matrix, layout)
        elif cfg.bell is not None:
            a, b = cfg.bell
            if not (0 <= a < width and 0 <= b < width and a != b):
                self._fail("/initial_state/bell", f"needs two distinct sites in 0..{width - 1}")
                return None
            pair = Operator(state_preset("bell", d), SlotLayout.of([(site_slot(a), d), (site_slot(b), d)]))
            rest = self.single(MatrixSpec(preset=cfg.rest), "/initial_state/rest", d, "density")
            if rest is None:
                return None
            op = pair
            for x in range(width):
                if x not in (a, b):
                    op = tensor(op, Operator(rest, SlotLayout.of([(site_slot(x), d)])))
            op = reorder(op, layout)
        else:
            names = cfg.product if cfg.product is not None else [cfg.preset] * width
            pointer = "/initial_state/product" if cfg.product is not None else "/initial_state/preset"
            if len(names) != width:
                self._fail(pointer, f"needs {width} entries, got {len(names)}")
                return None
            matrix = np.ones((1, 1), dtype=np.complex128)
            for x, name in enumerate(names):
                local = self.single(MatrixSpec(preset=name), pointer if cfg.product is None else f"{pointer}/{x}",
                                    d, "density")
                if local is None:
                    return None
                matrix = np.kron(matrix, local)
            op = Operator(matrix, layout)
        check = is_density(op, self.tol)
        if not check.is_valid:
            self._fail("/initial_state", f"not a density matrix: {check.details}")
            return None
        return DensityState(op.matrix, op.layout)

    def observer(self, index: int, system: SystemSpec) -> Optional[ObserverSpec]:
        cfg = self.config.observers[index]
        pointer = f"/observers/{index}"
        layout = SlotLayout.of([(probe_slot(cfg.name), cfg.dim)])
        state = self.single(cfg.state, f"{pointer}/state", cfg.dim, "density")
        observable = self.single(cfg.observable, f"{pointer}/observable", cfg.dim, "hermitian")
        couplings = []
        for j, coupling in enumerate(cfg.couplings):
            cell = Cell.of(coupling.cell)
            if not system.lattice.contains(cell):
                self._fail(f"{pointer}/couplings/{j}/cell", f"cell {cell.to_pair()} is outside the lattice")
                continue
            gate = self.gate(coupling.gate, f"{pointer}/couplings/{j}/gate", system.site_dim, cfg.dim)
            if gate is not None:
                couplings.append(Coupling(cell, gate))
        if state is None or observable is None or len(couplings) != len(cfg.couplings):
            return None
        try:
            probe = ProbeSpec(cfg.name, cfg.dim, DensityState(state, layout), tuple(couplings), cfg.nonlocal_)
            return ObserverSpec(cfg.name, probe, Operator(observable, layout))
        except FVError as e:
            self._fail(f"{pointer}/couplings", str(e))
            return None

    def charlie(self, experiment: Experiment) -> None:
        cfg = self.config.charlie
        system = experiment.system
        cells = [Cell.of(c) for c in cfg.region]
        outside = [c.to_pair() for c in cells if not system.lattice.contains(c)]
        if outside:
            self._fail("/charlie/region", f"cells {outside} are outside the lattice")
            return
        experiment.charlie_region = Region.of(system.lattice, cells)
        if cfg.observable is None:
            return
        cell = Cell.of(cfg.observable.cell)
        if cell not in experiment.charlie_region:
            self._fail("/charlie/observable/cell", f"cell {cell.to_pair()} is not in the declared region")
            return
        op = self.single(cfg.observable.op, "/charlie/observable/op", system.site_dim, "hermitian")
        if op is None:
            return
        pulled = CircuitService(system).local_observable(op, cell).op
        experiment.charlie_observable = LocalObservable(pulled, experiment.charlie_region)

    def total_dimension(self, system: SystemSpec) -> None:
        total = system.layout.total_dim * int(np.prod([o.dim for o in self.config.observers] or [1]))
        cap = Config.get(Config.MAX_DIMENSION)
        if total > cap:
            self._fail("/observers", f"system with all probes has dimension {total}, above the cap {cap}")


def build_experiment(config: ExperimentConfig) -> Experiment:
    """
    Turn a schema-valid config into domain objects.

    Raises:
        SchemaError: If cross-field requirements fail
        PhysicsValidationError: If matrices, worldlines or regions violate their contract
    """
    references = _check_references(config)
    if references:
        raise SchemaError("Config is missing required fields", references)

    experiment = Experiment(config=config, digest=config_digest(config))
    if config.system is None:
        return experiment

    builder = _PhysicsBuilder(config)
    system = builder.system()
    if system is not None:
        experiment.system = system
        builder.total_dimension(system)
        if config.initial_state is not None:
            experiment.omega = builder.initial_state(system)
        for i in range(len(config.observers)):
            obs = builder.observer(i, system)
            if obs is not None:
                experiment.observers[obs.name] = obs
        if config.charlie is not None:
            builder.charlie(experiment)
        if config.conditioning_effect is not None and config.pair is not None:
            first = next(o for o in config.observers if o.name == config.pair[0])
            effect = builder.single(config.conditioning_effect, "/conditioning_effect", first.dim, "effect")
            if effect is not None:
                layout = SlotLayout.of([(probe_slot(first.name), first.dim)])
                experiment.conditioning_effect = Effect(effect, layout)

    if builder.violations:
        for pointer, message in builder.violations:
            logger.warning(f"Physics validation: {pointer}: {message}")
        raise PhysicsValidationError("Config violates physical constraints", builder.violations)
    logger.debug(f"Experiment {config.experiment!r} built, digest {experiment.digest[:12]}")
    return experiment


def parse_config(path: Union[str, Path], seed: Optional[int] = None, tolerance: Optional[float] = None,
                 trials: Optional[int] = None) -> Experiment:
    """
    Read, validate and build an experiment config.

    CLI overrides are applied before schema validation, so they are checked
    like any other value and enter the config digest.

    Raises:
        ParseError: File unreadable or not JSON
        SchemaError: Shape, range or cross-reference problems
        PhysicsValidationError: Non-unitary gates, invalid states or effects,
            bad worldlines
    """
    raw = _read_json(path)
    if isinstance(raw, dict):
        for key, value in (("seed", seed), ("tolerance", tolerance), ("trials", trials)):
            if value is not None:
                raw[key] = value
    config = validate_schema(raw)
    logger.info(f"Config {Path(path).name}: experiment {config.experiment!r}, seed {config.seed}")
    return build_experiment(config)
