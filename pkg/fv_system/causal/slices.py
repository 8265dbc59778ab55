# fv_system/causal/slices.py
"""
Cauchy slices and the separating-slice search.

A slice is Cauchy when every inextendible causal path meets it in exactly
one cell. Paths may step diagonally, so a staircase with any rise or fall is
either skipped by some path or met twice; the search still runs over all
staircases and lets is_cauchy_slice decide.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from fv_system.causal.geometry import causal_future, causal_past
from fv_system.errors import GeometryViolation, NoSliceFound
from fv_system.models.lattice import Lattice, Region, Slice

logger = logging.getLogger(__name__)


def path_hit_range(lattice: Lattice, region: Region) -> Tuple[int, int]:
    """
    Minimum and maximum number of cells of `region` met by an inextendible
    causal path.
    """
    lo = [int((x, 0) in region) for x in range(lattice.width)]
    hi = list(lo)
    for t in range(1, lattice.depth):
        new_lo, new_hi = [], []
        for x in range(lattice.width):
            neighbours = [n for n in (x - 1, x, x + 1) if 0 <= n < lattice.width]
            here = 1 if (x, t) in region else 0
            new_lo.append(here + min(lo[n] for n in neighbours))
            new_hi.append(here + max(hi[n] for n in neighbours))
        lo, hi = new_lo, new_hi
    return min(lo), max(hi)


def is_cauchy_slice(s: Slice) -> bool:
    """True iff every inextendible causal path meets the slice exactly once."""
    lo, hi = path_hit_range(s.lattice, s.region())
    return lo == 1 and hi == 1


def _staircases(lower: Sequence[int], upper: Sequence[int]):
    """All staircases with lower[x] <= t(x) <= upper[x], in lexicographic order."""
    width = len(lower)

    def _extend(prefix: List[int]):
        x = len(prefix)
        if x == width:
            yield tuple(prefix)
            return
        start, stop = lower[x], upper[x]
        if prefix:
            start = max(start, prefix[-1] - 1)
            stop = min(stop, prefix[-1] + 1)
        for t in range(start, stop + 1):
            yield from _extend(prefix + [t])

    yield from _extend([])


def verify_separating_slice(s: Slice, k1: Region, k2: Region, l: Optional[Region] = None) -> bool:
    """
    Direct membership test of the separating-slice conclusion.

    Σ avoids J-(k1) ∪ J+(k2) ∪ J+(l), every cell of k1 lies strictly below Σ,
    and Σ is Cauchy.
    """
    l = l if l is not None else k1.lattice.empty()
    forbidden = causal_past(k1) | causal_future(k2) | causal_future(l)
    if not s.region().isdisjoint(forbidden):
        return False
    if any(cell.t >= s.level(cell.x) for cell in k1.cells):
        return False
    return is_cauchy_slice(s)


def find_separating_slice(k1: Region, k2: Region, l: Optional[Region] = None) -> Slice:
    """
    Pointwise-earliest Cauchy slice separating k1 from k2 and l.

    Args:
        k1: Region that must lie strictly below the slice
        k2: Region whose future the slice must avoid
        l: Optional extra region whose future the slice must avoid

    Returns:
        Slice satisfying verify_separating_slice

    Raises:
        GeometryViolation: If k2 or l meets J-(k1)
        NoSliceFound: If no staircase on this lattice qualifies
    """
    lattice = k1.lattice
    l = l if l is not None else lattice.empty()
    past_k1 = causal_past(k1)

    failed = []
    if not k2.isdisjoint(past_k1):
        failed.append("k2 meets J-(k1)")
    if not l.isdisjoint(past_k1):
        failed.append("l meets J-(k1)")
    if failed:
        raise GeometryViolation(failed)

    blocked_above = causal_future(k2) | causal_future(l)
    lower = [0] * lattice.width
    upper = [lattice.depth - 1] * lattice.width
    for cell in past_k1.cells:
        lower[cell.x] = max(lower[cell.x], cell.t + 1)
    for cell in blocked_above.cells:
        upper[cell.x] = min(upper[cell.x], cell.t - 1)

    candidates = []
    if all(lo <= hi for lo, hi in zip(lower, upper)):
        for levels in _staircases(lower, upper):
            s = Slice(lattice, levels)
            if is_cauchy_slice(s):
                candidates.append(levels)

    if not candidates:
        logger.debug(f"No separating slice: lower={lower} upper={upper}")
        raise NoSliceFound(
            f"No Cauchy slice separates the regions on a {lattice.width}x{lattice.depth} "
            f"lattice; enlarge the depth"
        )

    earliest = tuple(min(levels[x] for levels in candidates) for x in range(lattice.width))
    if earliest not in candidates:
        # pointwise min need not be Cauchy
        earliest = candidates[0]
    return Slice(lattice, earliest)
