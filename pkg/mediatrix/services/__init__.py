"""Orchestration services."""

from mediatrix.services.campaign_service import CampaignService, campaign_service
from mediatrix.services.fuzz_service import FuzzConfig, FuzzService, fuzz_service
from mediatrix.services.locc_service import EquivalenceResult, LoccService, locc_service
from mediatrix.services.protocol_service import ProtocolService, protocol_service
from mediatrix.services.reporting_service import ReportingService, reporting_service

__all__ = [
    "CampaignService",
    "EquivalenceResult",
    "FuzzConfig",
    "FuzzService",
    "LoccService",
    "ProtocolService",
    "ReportingService",
    "campaign_service",
    "fuzz_service",
    "locc_service",
    "protocol_service",
    "reporting_service",
]
