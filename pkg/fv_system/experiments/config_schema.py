# fv_system/experiments/config_schema.py
"""
Schema of experiment config files (JSON).

Only shape and ranges are checked here; matrices and worldlines are checked
for their physical contract by the loader once the schema passes.
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Cell = Tuple[int, int]
ComplexEntry = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class MatrixSpec(_Strict):
    """Named preset (with optional gate parameters) or an inline [re, im] matrix."""
    preset: Optional[str] = None
    matrix: Optional[List[List[ComplexEntry]]] = None
    angle: Optional[float] = None
    phase: Optional[float] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.preset is None) == (self.matrix is None):
            raise ValueError("give exactly one of 'preset' and 'matrix'")
        if self.matrix is not None:
            rows = len(self.matrix)
            if rows == 0 or any(len(row) != rows for row in self.matrix):
                raise ValueError("matrix must be square and non-empty")
        return self


class SystemConfig(_Strict):
    width: int = Field(ge=2, le=12)
    depth: int = Field(ge=1, le=16)
    site_dim: int = Field(default=2, ge=2, le=4)
    gate: Optional[MatrixSpec] = None
    random_gates: bool = False

    @model_validator(mode="after")
    def _one_dynamics(self):
        if (self.gate is None) == (not self.random_gates):
            raise ValueError("give either 'gate' or 'random_gates: true'")
        return self


class InitialStateConfig(_Strict):
    """
    Initial system state. Exactly one form:
    preset (every site), product (one preset per site), bell (pair of sites,
    remaining sites in `rest`), matrix (inline), random ("pure_product" or "mixed").
    """
    preset: Optional[str] = None
    product: Optional[List[str]] = None
    bell: Optional[Tuple[int, int]] = None
    rest: str = "zero"
    matrix: Optional[List[List[ComplexEntry]]] = None
    random: Optional[Literal["pure_product", "mixed"]] = None

    @model_validator(mode="after")
    def _one_form(self):
        given = [f for f in ("preset", "product", "bell", "matrix", "random") if getattr(self, f) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one initial-state form, got {given or 'none'}")
        return self


class CouplingConfig(_Strict):
    cell: Cell
    gate: MatrixSpec


class ObserverConfig(_Strict):
    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_\-]+$")
    dim: int = Field(default=2, ge=2, le=4)
    state: MatrixSpec
    couplings: List[CouplingConfig] = Field(default_factory=list)
    observable: MatrixSpec
    nonlocal_: bool = Field(default=False, alias="nonlocal")


class LocalObservableConfig(_Strict):
    cell: Cell
    op: MatrixSpec


class CharlieConfig(_Strict):
    region: List[Cell] = Field(min_length=1)
    observable: Optional[LocalObservableConfig] = None
    observer: Optional[str] = None

    @model_validator(mode="after")
    def _one_charlie(self):
        if (self.observable is None) == (self.observer is None):
            raise ValueError("give exactly one of 'observable' and 'observer'")
        return self


class ExperimentConfig(_Strict):
    version: Literal[1]
    experiment: Literal["sorkin", "adversary", "theorem2", "factorisation", "spacelike", "lemma1", "campaign"]
    seed: int = Field(default=0, ge=0, lt=2 ** 63)
    tolerance: float = Field(default=1e-9, gt=0)
    trials: int = Field(default=0, ge=0)

    system: Optional[SystemConfig] = None
    initial_state: Optional[InitialStateConfig] = None
    observers: List[ObserverConfig] = Field(default_factory=list)

    # sorkin / adversary
    alice: Optional[str] = None
    bob: Optional[str] = None
    charlie: Optional[CharlieConfig] = None
    threshold: Optional[float] = Field(default=None, gt=0)
    budget: Optional[int] = Field(default=None, ge=0)

    # theorem2
    target: Optional[str] = None
    spacelike: Optional[str] = None
    allow_disconnected_target: bool = False

    # factorisation
    order: Optional[List[str]] = None
    force_order: bool = False

    # spacelike
    pair: Optional[Tuple[str, str]] = None
    conditioning_effect: Optional[MatrixSpec] = None

    # lemma1
    exhaustive: bool = False

    # campaign
    checks: List[Literal["sorkin", "oracle", "lemma1", "factorisation", "theorem2", "updates", "lightcone"]] = \
        Field(default_factory=list)
