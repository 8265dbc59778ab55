# fv_system/services/__init__.py
from fv_system.services.circuit_service import CircuitService
from fv_system.services.probe_service import ProbeService
from fv_system.services.update_service import UpdateService, complement_effect, site_marginal
from fv_system.services.protocol_service import ProtocolService
from fv_system.services.oracle_service import SchrodingerOracle
from fv_system.services.campaign_service import CampaignService

__all__ = [
    'CircuitService',
    'ProbeService',
    'UpdateService',
    'ProtocolService',
    'SchrodingerOracle',
    'CampaignService',
    'complement_effect',
    'site_marginal',
]
