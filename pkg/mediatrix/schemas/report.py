"""Report schemas (run, fuzz campaign, LOCC verification sweep)."""

from typing import Literal

from pydantic import BaseModel, Field


class StepRow(BaseModel):
    """One trajectory record."""

    step: int
    negativity_ab: float
    negativity_a_gb: float
    negativity_ag_b: float
    ensemble_terms: int | None = None
    certificate_residual: float | None = None


class RunSummary(BaseModel):
    final_negativity_ab: float
    theorem_pass: bool | None = None
    wall_time_ms: float | None = None


class RunReport(BaseModel):
    """Single protocol run."""

    kind: Literal["run"] = "run"
    name: str
    mediator_mode: Literal["classical", "quantum"]
    seed: int | None = None
    rows: list[StepRow] = Field(default_factory=list)
    summary: RunSummary

    @property
    def violation(self) -> bool:
        return self.summary.theorem_pass is False


class FuzzRow(BaseModel):
    """One fuzzed Classical-mode protocol."""

    index: int
    sub_seed: int
    steps: int
    final_negativity_ab: float
    max_negativity_ab: float
    max_certificate_residual: float
    theorem_pass: bool


class FuzzSummary(BaseModel):
    count: int
    max_final_negativity_ab: float | None = None
    max_certificate_residual: float | None = None
    violator_sub_seeds: list[int] = Field(default_factory=list)
    wall_time_ms: float | None = None


class FuzzReport(BaseModel):
    """Aggregate of a fuzz campaign."""

    kind: Literal["fuzz"] = "fuzz"
    seed: int
    d_a: int
    d_g: int
    d_b: int
    max_steps: int
    rows: list[FuzzRow] = Field(default_factory=list)
    summary: FuzzSummary

    @property
    def violation(self) -> bool:
        return bool(self.summary.violator_sub_seeds)


class LoccRow(BaseModel):
    """One verified LOCC protocol."""

    index: int
    sub_seed: int
    rounds: int
    alphabet: int
    mediator_dim: int
    max_choi_deviation: float
    compiled_negativity_ab: float
    passed: bool


class LoccSummary(BaseModel):
    count: int
    max_choi_deviation: float | None = None
    max_compiled_negativity_ab: float | None = None
    failed_sub_seeds: list[int] = Field(default_factory=list)
    wall_time_ms: float | None = None


class LoccVerifyReport(BaseModel):
    """Aggregate of a LOCC compilation sweep."""

    kind: Literal["locc-verify"] = "locc-verify"
    seed: int
    generator: Literal["random", "identity"]
    rounds: int
    alphabet: int
    rows: list[LoccRow] = Field(default_factory=list)
    summary: LoccSummary

    @property
    def violation(self) -> bool:
        return bool(self.summary.failed_sub_seeds)


Report = RunReport | FuzzReport | LoccVerifyReport
