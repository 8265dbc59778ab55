# fv_system/models/lattice.py
"""
Spacetime lattice value types: Lattice, Cell, Region, Slice, CausalOrder.

All types are immutable. Geometry (cones, hulls, orders) lives in
fv_system.causal; these classes only hold and validate data.
"""
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

CellLike = Union["Cell", Tuple[int, int], Sequence[int]]


@dataclass(frozen=True, order=True)
class Cell:
    """Lattice point (x, t): site x at time layer t."""
    x: int
    t: int

    @classmethod
    def of(cls, value: CellLike) -> "Cell":
        """Coerce an (x, t) pair or Cell into a Cell."""
        if isinstance(value, Cell):
            return value
        x, t = value
        return cls(int(x), int(t))

    def to_pair(self) -> List[int]:
        return [self.x, self.t]


@dataclass(frozen=True)
class Lattice:
    """
    Finite 1+1D lattice with W sites and T time layers.

    Light speed is one site per layer; the spatial boundary is open.
    """
    width: int
    depth: int

    def __post_init__(self):
        if self.width < 2:
            raise ValueError(f"Lattice width must be >= 2, got {self.width}")
        if self.depth < 1:
            raise ValueError(f"Lattice depth must be >= 1, got {self.depth}")

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell.x < self.width and 0 <= cell.t < self.depth

    def cells(self) -> Iterator[Cell]:
        """Iterate all cells, time-major."""
        for t in range(self.depth):
            for x in range(self.width):
                yield Cell(x, t)

    def region(self, cells: Iterable[CellLike] = ()) -> "Region":
        return Region.of(self, cells)

    def full(self) -> "Region":
        return Region(self, frozenset(self.cells()))

    def empty(self) -> "Region":
        return Region(self, frozenset())

    def row(self, t: int) -> "Region":
        return Region(self, frozenset(Cell(x, t) for x in range(self.width)))


@dataclass(frozen=True)
class Region:
    """Finite set of cells of one lattice."""
    lattice: Lattice
    cells: FrozenSet[Cell] = field(default_factory=frozenset)

    def __post_init__(self):
        outside = [c for c in self.cells if not self.lattice.contains(c)]
        if outside:
            raise ValueError(
                f"Cells outside {self.lattice.width}x{self.lattice.depth} lattice: "
                f"{sorted((c.x, c.t) for c in outside)}"
            )

    @classmethod
    def of(cls, lattice: Lattice, cells: Iterable[CellLike] = ()) -> "Region":
        return cls(lattice, frozenset(Cell.of(c) for c in cells))

    # ─────────────────────────────────────────────────────────────────────
    # Set protocol
    # ─────────────────────────────────────────────────────────────────────

    def __iter__(self) -> Iterator[Cell]:
        return iter(sorted(self.cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, item: CellLike) -> bool:
        return Cell.of(item) in self.cells

    def __bool__(self) -> bool:
        return bool(self.cells)

    def _check_same(self, other: "Region") -> None:
        if other.lattice != self.lattice:
            raise ValueError("Regions belong to different lattices")

    def __or__(self, other: "Region") -> "Region":
        self._check_same(other)
        return Region(self.lattice, self.cells | other.cells)

    def __and__(self, other: "Region") -> "Region":
        self._check_same(other)
        return Region(self.lattice, self.cells & other.cells)

    def __sub__(self, other: "Region") -> "Region":
        self._check_same(other)
        return Region(self.lattice, self.cells - other.cells)

    def issubset(self, other: "Region") -> bool:
        self._check_same(other)
        return self.cells <= other.cells

    def isdisjoint(self, other: "Region") -> bool:
        self._check_same(other)
        return self.cells.isdisjoint(other.cells)

    # ─────────────────────────────────────────────────────────────────────
    # Helpers
    # ─────────────────────────────────────────────────────────────────────

    def sites(self) -> FrozenSet[int]:
        return frozenset(c.x for c in self.cells)

    def to_pairs(self) -> List[List[int]]:
        """Sorted [[x, t], ...] used by configs and reports."""
        return [[c.x, c.t] for c in sorted(self.cells, key=lambda c: (c.x, c.t))]


@dataclass(frozen=True)
class Slice:
    """
    Staircase slice: one time level per site, neighbours differing by <= 1.

    Whether the slice is Cauchy (met exactly once by every inextendible
    causal path) is decided by fv_system.causal.slices.is_cauchy_slice.
    """
    lattice: Lattice
    levels: Tuple[int, ...]

    def __post_init__(self):
        if len(self.levels) != self.lattice.width:
            raise ValueError(f"Slice needs {self.lattice.width} levels, got {len(self.levels)}")
        for x, t in enumerate(self.levels):
            if not 0 <= t < self.lattice.depth:
                raise ValueError(f"Slice level t({x})={t} outside 0..{self.lattice.depth - 1}")
        for x in range(self.lattice.width - 1):
            if abs(self.levels[x + 1] - self.levels[x]) > 1:
                raise ValueError(f"Slice is not a staircase between x={x} and x={x + 1}")

    @classmethod
    def constant(cls, lattice: Lattice, t: int) -> "Slice":
        return cls(lattice, tuple([t] * lattice.width))

    def level(self, x: int) -> int:
        return self.levels[x]

    def region(self) -> Region:
        return Region(self.lattice, frozenset(Cell(x, t) for x, t in enumerate(self.levels)))


@dataclass(frozen=True)
class CausalOrder:
    """
    Linear arrangement of a region family.

    `indices` records the position of each region in the family it was
    enumerated from, so observer lists can be permuted alongside.
    """
    regions: Tuple[Region, ...]
    indices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.regions)

    def position(self, index: int) -> int:
        """Position in this order of the family member with original `index`."""
        return self.indices.index(index)
