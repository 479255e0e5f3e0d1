"""Simulator configuration via pydantic-settings."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import Field, computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator settings loaded from environment variables (MEDIATRIX_*)."""

    model_config = SettingsConfigDict(
        env_prefix="MEDIATRIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Reports
    report_schema: str = "mediatrix-report-v1"

    # State checks
    herm_tol: float = 1e-10
    psd_tol: float = 1e-10
    trace_tol: float = 1e-10
    prob_tol: float = 1e-12

    # Equality checks
    equality_tol: float = 1e-12
    accumulated_tol: float = 1e-9

    # Channel checks
    tp_tol: float = 1e-8
    cp_tol: float = 1e-8
    instrument_tol: float = 1e-10
    classical_tol: float = 1e-9

    # Certificates
    merge_tol: float = 1e-12
    theorem_tol: float = 1e-9

    # Fuzz caps (protocol generator)
    fuzz_max_da: int = Field(default=3, ge=1)
    fuzz_max_dg: int = Field(default=4, ge=1)
    fuzz_max_db: int = Field(default=3, ge=1)
    fuzz_max_steps: int = Field(default=10, ge=0)
    fuzz_max_env: int = Field(default=3, ge=1)

    # Scenario caps (config files)
    scenario_max_da: int = Field(default=8, ge=1)
    scenario_max_dg: int = Field(default=16, ge=1)
    scenario_max_db: int = Field(default=8, ge=1)
    scenario_max_steps: int = Field(default=10, ge=0)

    # LOCC caps
    locc_max_rounds: int = Field(default=3, ge=1)
    locc_max_alphabet: int = Field(default=3, ge=1)
    locc_max_local_dim: int = Field(default=3, ge=1)
    mediator_dim_cap: int = Field(default=64, ge=1)

    # Runtime
    workers: int = Field(default=4, ge=1)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    report_timing: bool = False
    report_format: Literal["csv", "json"] = "csv"

    @computed_field
    @property
    def report_header(self) -> str:
        """Versioned first line of every CSV report."""
        return f"# {self.report_schema}"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
