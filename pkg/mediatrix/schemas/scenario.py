"""Scenario configuration schema.

Scenario files are TOML. Unknown keys are rejected at every level.

    name = "bmv-classical"
    mediator_mode = "classical"
    steps = "bmv"

    [report]
    format = "csv"
    path = "out/bmv.csv"

A randomized scenario replaces `steps = "bmv"` with a table:

    seed = 42
    [layout]
    dA = 2
    dG = 3
    dB = 2
    [steps]
    count = 6
    generator = "random"
"""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from mediatrix.config import settings
from mediatrix.core.exceptions import ConfigOutOfRange, ConfigParseError, SchemaViolation
from mediatrix.utils.seeding import UINT64_MAX


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, allow_inf_nan=False)


class LayoutConfig(_Strict):
    """Leg dimensions."""

    d_a: int = Field(alias="dA", ge=1)
    d_g: int = Field(alias="dG", ge=1)
    d_b: int = Field(alias="dB", ge=1)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.d_a, self.d_g, self.d_b


class KrausMatrix(_Strict):
    """One Kraus operator as real and (optional) imaginary parts."""

    real: list[list[float]]
    imag: list[list[float]] | None = None

    def to_array(self) -> np.ndarray:
        try:
            real = np.array(self.real, dtype=float)
            imag = np.zeros_like(real) if self.imag is None else np.array(self.imag, dtype=float)
        except ValueError as exc:
            raise SchemaViolation(f"Kraus matrix rows have unequal lengths: {exc}") from exc
        if real.shape != imag.shape:
            raise SchemaViolation(f"Kraus real part {real.shape} and imaginary part {imag.shape} differ")
        return real + 1j * imag


class ExplicitStep(_Strict):
    """Interaction on [A, G] (left) or [G, B] (right); the bystander defaults to the identity."""

    side: Literal["left", "right"]
    interaction: list[KrausMatrix] = Field(min_length=1)
    bystander: list[KrausMatrix] | None = None


class StepsConfig(_Strict):
    count: int = Field(ge=0)
    generator: Literal["random", "explicit"]
    env_dim: int = Field(default=2, ge=1)
    initial: Literal["zero", "random"] = "zero"
    explicit: list[ExplicitStep] | None = None

    @model_validator(mode="after")
    def check_explicit(self) -> StepsConfig:
        if self.generator == "explicit":
            if self.explicit is None:
                raise ValueError("generator 'explicit' needs an [[steps.explicit]] list")
            if len(self.explicit) != self.count:
                raise ValueError(f"count={self.count} but {len(self.explicit)} explicit steps were given")
        elif self.explicit is not None:
            raise ValueError("explicit steps are only allowed with generator 'explicit'")
        return self


class ReportConfig(_Strict):
    format: Literal["csv", "json"] = "csv"
    path: str | None = None


class ScenarioConfig(_Strict):
    """One protocol run."""

    name: str = Field(min_length=1)
    mediator_mode: Literal["classical", "quantum"]
    seed: int | None = Field(default=None, ge=0, le=UINT64_MAX)
    layout: LayoutConfig | None = None
    steps: Literal["bmv"] | StepsConfig
    report: ReportConfig = Field(default_factory=ReportConfig)

    @model_validator(mode="after")
    def check_scenario(self) -> ScenarioConfig:
        if self.steps == "bmv":
            if self.layout is not None and self.layout.dims != (2, 2, 2):
                raise ValueError("the bmv scenario runs on dA = dG = dB = 2")
            return self
        if self.layout is None:
            raise ValueError("a [layout] table is required unless steps = 'bmv'")
        randomized = self.steps.generator == "random" or self.steps.initial == "random"
        if randomized and self.seed is None:
            raise ValueError("seed is mandatory for randomized scenarios")
        return self

    @property
    def is_bmv(self) -> bool:
        return self.steps == "bmv"

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, 2, 2) if self.layout is None else self.layout.dims

    def check_caps(self) -> None:
        """Raises ConfigOutOfRange when dims, step count or env_dim exceed the caps."""
        d_a, d_g, d_b = self.dims
        for name, value, limit in (
            ("dA", d_a, settings.scenario_max_da),
            ("dG", d_g, settings.scenario_max_dg),
            ("dB", d_b, settings.scenario_max_db),
        ):
            if value > limit:
                raise ConfigOutOfRange(name, value, limit)
        if isinstance(self.steps, StepsConfig) and self.steps.count > settings.scenario_max_steps:
            raise ConfigOutOfRange("steps.count", self.steps.count, settings.scenario_max_steps)
        if isinstance(self.steps, StepsConfig) and self.steps.env_dim > settings.fuzz_max_env:
            raise ConfigOutOfRange("steps.env_dim", self.steps.env_dim, settings.fuzz_max_env)


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a TOML scenario file.

    Raises:
        ConfigParseError: Unreadable file or invalid TOML
        SchemaViolation: Document does not match the schema
        ConfigOutOfRange: Dims, step count or env_dim above the caps
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigParseError(str(path), exc.strerror or str(exc)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(str(path), str(exc)) from exc
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or '<root>'}: {error['msg']}"
            for error in exc.errors()
        )
        raise SchemaViolation(f"{path}: {problems}") from exc
    config.check_caps()
    return config
