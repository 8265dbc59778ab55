# fv_system/causal/ordering.py
"""
Causal orderability of region families.

K precedes K' iff J-(K) ∩ J+(K') = ∅, i.e. nothing in K' can influence K.
The condition is checked on every pair, since it is not transitive on a
finite lattice.
"""
import logging
from typing import List, Sequence, Tuple

from fv_system.causal.geometry import causal_future, causal_past
from fv_system.errors import NotOrderable
from fv_system.models.lattice import CausalOrder, Region

logger = logging.getLogger(__name__)


def may_precede(k: Region, k_next: Region) -> bool:
    """True iff k may come before k_next in a causal order."""
    return (causal_past(k) & causal_future(k_next)).cells == frozenset()


def _precedence_table(regions: Sequence[Region]) -> List[List[bool]]:
    n = len(regions)
    pasts = [causal_past(r) for r in regions]
    futures = [causal_future(r) for r in regions]
    return [
        [i == j or not (pasts[i].cells & futures[j].cells) for j in range(n)]
        for i in range(n)
    ]


def enumerate_causal_orders(regions: Sequence[Region]) -> List[CausalOrder]:
    """
    All permutations of `regions` satisfying the pairwise order condition.

    Orders are returned sorted lexicographically by original index, so the
    first entry is a deterministic default choice.

    Args:
        regions: Region family (overlaps allowed, usually unorderable)

    Returns:
        List of CausalOrder, possibly empty
    """
    regions = list(regions)
    table = _precedence_table(regions)
    n = len(regions)
    found: List[Tuple[int, ...]] = []

    def _extend(prefix: List[int], remaining: List[int]) -> None:
        if not remaining:
            found.append(tuple(prefix))
            return
        for idx in remaining:
            if all(table[p][idx] for p in prefix):
                rest = [r for r in remaining if r != idx]
                _extend(prefix + [idx], rest)

    _extend([], list(range(n)))
    logger.debug(f"Enumerated {len(found)} causal orders for {n} regions")
    return [CausalOrder(tuple(regions[i] for i in perm), perm) for perm in found]


def is_causally_orderable(regions: Sequence[Region]) -> bool:
    return bool(enumerate_causal_orders(regions))


def validate_order(regions: Sequence[Region]) -> None:
    """
    Check that the given sequence is itself a valid causal order.

    Raises:
        NotOrderable: naming the first offending pair
    """
    regions = list(regions)
    table = _precedence_table(regions)
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            if not table[i][j]:
                raise NotOrderable(
                    f"Region #{i} cannot precede region #{j}: "
                    f"J-(K{i}) meets J+(K{j})"
                )


def order_of(regions: Sequence[Region]) -> CausalOrder:
    """Validated CausalOrder for a sequence given in intended order."""
    validate_order(regions)
    return CausalOrder(tuple(regions), tuple(range(len(regions))))
