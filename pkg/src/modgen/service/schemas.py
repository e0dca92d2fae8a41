"""Pydantic request/response models for the run service.

Arbitrary-precision parameters (b, mass, sigma, probe positions) travel as
decimal strings; JSON floats would silently corrupt them.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..pipeline import EMIT_CHOICES

Scenario = Literal["wedge2d", "cone2d", "cone4d"]


def _check_decimal(value: str, name: str) -> str:
    try:
        float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a decimal string, got {value!r}")
    return value


class RunRequest(BaseModel):
    scenario: Scenario
    n: int = Field(default=256, ge=8)
    b: str = "4"
    mass: str = "1"
    ell: int = Field(default=0, ge=0, le=1)
    digits: Optional[int] = Field(default=None, ge=30)
    sigma: Optional[str] = None
    probes: Optional[str] = None
    quad_order: int = Field(default=64, ge=16)
    emit: list[Literal["report_csv", "kernel_csv", "matrices"]] = ["report_csv"]
    retry_precision: bool = False

    @field_validator("b", "mass")
    @classmethod
    def _decimal_fields(cls, v, info):
        return _check_decimal(v, info.field_name)

    @field_validator("sigma")
    @classmethod
    def _optional_decimal(cls, v, info):
        if v is None:
            return v
        return _check_decimal(v, info.field_name)

    @field_validator("emit")
    @classmethod
    def _emit_known(cls, v):
        for flag in v:
            if flag not in EMIT_CHOICES:
                raise ValueError(f"unknown emit flag {flag!r}")
        return v


class DiagnosticsModel(BaseModel):
    spectral_margin: str
    inverse_residual: str
    symmetry_residual: str


class ReportRowModel(BaseModel):
    mu: str
    value: str
    references: dict[str, str]
    rel_errors: dict[str, str]


class RunResponse(BaseModel):
    config: dict
    cache_key: str
    cache_hit: bool
    diagnostics: DiagnosticsModel
    rows: list[ReportRowModel]
    artifacts: dict[str, str] = {}
    elapsed_seconds: float


class SweepRequest(RunRequest):
    masses: list[str] = Field(min_length=1)
    ells: Optional[list[int]] = None

    @field_validator("masses")
    @classmethod
    def _masses_decimal(cls, v):
        return [_check_decimal(x, "masses") for x in v]

    @field_validator("ells")
    @classmethod
    def _ells_known(cls, v):
        if v is not None and any(e not in (0, 1) for e in v):
            raise ValueError("ells must be a subset of {0, 1}")
        return v


class SweepResponse(BaseModel):
    runs: list[RunResponse]


class ValidateRequest(BaseModel):
    criteria: Optional[list[int]] = None
    cache_dir: Optional[str] = None


class CriterionModel(BaseModel):
    number: int
    name: str
    passed: bool
    detail: str
    elapsed_seconds: float


class ValidateResponse(BaseModel):
    criteria: list[CriterionModel]
    passed: bool


class HealthResponse(BaseModel):
    status: str
    version: str
