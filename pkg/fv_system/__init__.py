# fv_system/__init__.py
"""
fv_system - finite 1+1D lattice realization of probe-based local
measurement: scattering maps, state updates and no-signalling checks.
"""

# Services
from fv_system.services.circuit_service import CircuitService
from fv_system.services.probe_service import ProbeService
from fv_system.services.update_service import UpdateService
from fv_system.services.protocol_service import ProtocolService
from fv_system.services.campaign_service import CampaignService

# Models
from fv_system.models.lattice import Cell, Lattice, Region
from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout

# Events
from fv_system.events.event_bus import event_bus, VerificationEvents

__all__ = [
    # Services
    'CircuitService',
    'ProbeService',
    'UpdateService',
    'ProtocolService',
    'CampaignService',

    # Models
    'Lattice',
    'Cell',
    'Region',
    'Operator',
    'DensityState',
    'Effect',
    'SlotLayout',

    # Events
    'event_bus',
    'VerificationEvents',
]
