# fv_system/causal/geometry.py
"""
Causal structure of the 1+1D lattice.

Light cones have unit speed and are clipped at the open spatial boundary.
A causal path is a cell sequence with t increasing by exactly one and
|dx| <= 1 per step; inextendible paths run from t=0 to t=T-1 and are never
terminated by the spatial edges.
"""
import logging
from typing import Iterable, List, Sequence, Set

from fv_system.models.lattice import Cell, CellLike, Lattice, Region

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# CONES
# ═══════════════════════════════════════════════════════════════════════════

def _arrival_times(r: Region, future: bool) -> List[float]:
    """Per column, the earliest (latest) time reached by the cone of r."""
    lattice = r.lattice
    inf = float("inf")
    best = [inf if future else -inf] * lattice.width
    for cell in r.cells:
        for x in range(lattice.width):
            if future:
                best[x] = min(best[x], cell.t + abs(x - cell.x))
            else:
                best[x] = max(best[x], cell.t - abs(x - cell.x))
    return best


def causal_future(r: Region) -> Region:
    """J+(r): cells (x', t') with t' - t >= |x' - x| for some (x, t) in r."""
    lattice = r.lattice
    arrival = _arrival_times(r, future=True)
    cells = [
        Cell(x, t)
        for x in range(lattice.width)
        for t in range(lattice.depth)
        if t >= arrival[x]
    ]
    return Region(lattice, frozenset(cells))


def causal_past(r: Region) -> Region:
    """J-(r): time mirror of causal_future."""
    lattice = r.lattice
    arrival = _arrival_times(r, future=False)
    cells = [
        Cell(x, t)
        for x in range(lattice.width)
        for t in range(lattice.depth)
        if t <= arrival[x]
    ]
    return Region(lattice, frozenset(cells))


def causal_complement(k: Region) -> Region:
    """K-perp: cells neither in the future nor the past of k."""
    return k.lattice.full() - causal_future(k) - causal_past(k)


def causal_hull(n: Region) -> Region:
    """ch(N) = J+(N) ∩ J-(N)."""
    return causal_future(n) & causal_past(n)


def is_causally_related(p: Cell, q: Cell) -> bool:
    return abs(p.x - q.x) <= abs(p.t - q.t)


def are_spacelike(a: Region, b: Region) -> bool:
    """True iff every cell of a is spacelike to every cell of b."""
    return all(not is_causally_related(p, q) for p in a.cells for q in b.cells)


# ═══════════════════════════════════════════════════════════════════════════
# DOMAIN OF DEPENDENCE
# ═══════════════════════════════════════════════════════════════════════════

def _avoiding_reach(lattice: Lattice, blocked: Set[Cell], upward: bool) -> Set[Cell]:
    """
    Cells reachable by a path from the initial (upward) or final row that
    avoids `blocked`, endpoint included.
    """
    rows = range(lattice.depth) if upward else range(lattice.depth - 1, -1, -1)
    reach: Set[Cell] = set()
    previous = None
    for t in rows:
        for x in range(lattice.width):
            cell = Cell(x, t)
            if cell in blocked:
                continue
            if previous is None:
                reach.add(cell)
            elif any(Cell(x + dx, previous) in reach for dx in (-1, 0, 1)):
                reach.add(cell)
        previous = t
    return reach


def domain_of_dependence(n: Region) -> Region:
    """
    D(N): cells p such that every inextendible causal path through p meets N.

    A path through p avoids N iff p itself is outside N and p can be reached
    from row 0 and from row T-1 without entering N.
    """
    lattice = n.lattice
    blocked = set(n.cells)
    from_below = _avoiding_reach(lattice, blocked, upward=True)
    from_above = _avoiding_reach(lattice, blocked, upward=False)
    cells = [c for c in lattice.cells() if not (c in from_below and c in from_above)]
    return Region(lattice, frozenset(cells))


# ═══════════════════════════════════════════════════════════════════════════
# WORLDLINES AND CONNECTEDNESS
# ═══════════════════════════════════════════════════════════════════════════

def validate_probe_worldline(cells: Sequence[CellLike]) -> bool:
    """
    Check that cells form a timelike worldline.

    Args:
        cells: Coupling cells in the order the probe visits them

    Returns:
        True iff times strictly increase and |dx| <= dt between neighbours
    """
    path = [Cell.of(c) for c in cells]
    for a, b in zip(path, path[1:]):
        dt = b.t - a.t
        if dt <= 0 or abs(b.x - a.x) > dt:
            return False
    return True


def _components(cells: Iterable[Cell]) -> List[Set[Cell]]:
    """Connected components under king-move (8-neighbour) adjacency."""
    remaining = set(cells)
    components: List[Set[Cell]] = []
    while remaining:
        seed = remaining.pop()
        component = {seed}
        frontier = [seed]
        while frontier:
            c = frontier.pop()
            for dx in (-1, 0, 1):
                for dt in (-1, 0, 1):
                    nb = Cell(c.x + dx, c.t + dt)
                    if nb in remaining:
                        remaining.remove(nb)
                        component.add(nb)
                        frontier.append(nb)
        components.append(component)
    return components


def is_connected(region: Region) -> bool:
    """Empty and single-component regions are connected."""
    return len(_components(region.cells)) <= 1


def connected_hull(k: Region) -> Region:
    """Union of the connected components of causal_hull(k) that meet k."""
    hull = causal_hull(k)
    cells: Set[Cell] = set()
    for component in _components(hull.cells):
        if component & k.cells:
            cells |= component
    return Region(k.lattice, frozenset(cells))


def footprint_sites(region: Region) -> Set[int]:
    """All t=0 sites within the past cone of the region."""
    width = region.lattice.width
    sites: Set[int] = set()
    for cell in region.cells:
        sites.update(range(max(0, cell.x - cell.t), min(width, cell.x + cell.t + 1)))
    return sites
