# fv_system/models/__init__.py
"""
Value types. Specs (fv_system.models.specs) depend on the causal package and
are imported from there directly.
"""
from fv_system.models.lattice import CausalOrder, Cell, Lattice, Region, Slice
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout
from fv_system.models.reports import (
    CampaignReport,
    CheckResult,
    CommutationReport,
    FactorisationReport,
    Lemma1Report,
    OracleReport,
    SignallingReport,
    TrialResult,
)

__all__ = [
    # Geometry
    'Lattice',
    'Cell',
    'Region',
    'Slice',
    'CausalOrder',

    # Operators
    'SlotLayout',
    'Operator',
    'DensityState',
    'Effect',

    # Reports
    'Lemma1Report',
    'FactorisationReport',
    'SignallingReport',
    'CommutationReport',
    'OracleReport',
    'TrialResult',
    'CampaignReport',
    'CheckResult',
]
