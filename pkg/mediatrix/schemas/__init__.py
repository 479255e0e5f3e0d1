"""Pydantic schemas for scenario files and reports."""

from mediatrix.schemas.report import (
    FuzzReport,
    FuzzRow,
    FuzzSummary,
    LoccRow,
    LoccSummary,
    LoccVerifyReport,
    Report,
    RunReport,
    RunSummary,
    StepRow,
)
from mediatrix.schemas.scenario import ScenarioConfig, load_scenario

__all__ = [
    "FuzzReport",
    "FuzzRow",
    "FuzzSummary",
    "LoccRow",
    "LoccSummary",
    "LoccVerifyReport",
    "Report",
    "RunReport",
    "RunSummary",
    "ScenarioConfig",
    "StepRow",
    "load_scenario",
]
