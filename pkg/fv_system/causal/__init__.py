# fv_system/causal/__init__.py
"""Exact causal structure of the finite 1+1D lattice."""
from fv_system.causal.geometry import (
    are_spacelike,
    causal_complement,
    causal_future,
    causal_hull,
    causal_past,
    connected_hull,
    domain_of_dependence,
    footprint_sites,
    is_causally_related,
    is_connected,
    validate_probe_worldline,
)
from fv_system.causal.ordering import (
    enumerate_causal_orders,
    is_causally_orderable,
    may_precede,
    order_of,
    validate_order,
)
from fv_system.causal.slices import (
    find_separating_slice,
    is_cauchy_slice,
    path_hit_range,
    verify_separating_slice,
)

__all__ = [
    # Cones and regions
    'causal_future',
    'causal_past',
    'causal_complement',
    'causal_hull',
    'domain_of_dependence',
    'connected_hull',
    'is_connected',
    'are_spacelike',
    'is_causally_related',
    'footprint_sites',
    'validate_probe_worldline',

    # Orders
    'enumerate_causal_orders',
    'is_causally_orderable',
    'may_precede',
    'order_of',
    'validate_order',

    # Slices
    'find_separating_slice',
    'verify_separating_slice',
    'is_cauchy_slice',
    'path_hit_range',
]
