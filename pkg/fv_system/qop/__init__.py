# fv_system/qop/__init__.py
"""Dense operator algebra over labelled tensor slots."""
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout
from fv_system.qop.algebra import (
    apply_left,
    apply_right,
    check_dimension,
    commutator,
    commutator_norm,
    conjugate,
    embed,
    hermitian_part,
    partial_trace,
    psd_sqrt,
    relative_gap,
    reorder,
    tensor,
    unitary_power,
)
from fv_system.qop.basis import PAULI, basis_element, gell_mann_basis, projector
from fv_system.qop.random_ops import (
    make_rng,
    random_density,
    random_effect,
    random_hermitian,
    random_product_state,
    random_pure_state,
    random_unitary,
    substream_seed,
)
from fv_system.qop.validator import (
    SpectrumCheck,
    SpectrumCode,
    is_density,
    is_effect,
    is_hermitian,
    is_unitary,
    min_eigenvalue,
)

__all__ = [
    # Types
    'SlotLayout',
    'Operator',
    'DensityState',
    'Effect',

    # Algebra
    'tensor',
    'embed',
    'partial_trace',
    'apply_left',
    'apply_right',
    'conjugate',
    'reorder',
    'commutator',
    'commutator_norm',
    'relative_gap',
    'psd_sqrt',
    'unitary_power',
    'hermitian_part',
    'check_dimension',

    # Bases
    'PAULI',
    'gell_mann_basis',
    'basis_element',
    'projector',

    # Randomness
    'make_rng',
    'substream_seed',
    'random_unitary',
    'random_density',
    'random_pure_state',
    'random_product_state',
    'random_effect',
    'random_hermitian',

    # Validation
    'SpectrumCode',
    'SpectrumCheck',
    'is_effect',
    'is_density',
    'is_hermitian',
    'is_unitary',
    'min_eigenvalue',
]
