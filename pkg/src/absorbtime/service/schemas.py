"""Pydantic request/response models of the HTTP surface."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from ..experiment import (BoundsConfig, BoundsReportModel, ConvergenceResult,
                          ExperimentConfig, McConfig, McResult)


class LatticePayload(BaseModel):
    atoms: list[float]
    masses: list[float]
    pruned_mass: float = 0.0


class LimitSpec(BaseModel):
    kind: Literal["normal", "stable"]
    alpha: float | None = None

    @model_validator(mode="after")
    def _alpha_needed(self):
        if self.kind == "stable" and self.alpha is None:
            raise ValueError("stable limit needs alpha")
        return self


class AffineSpec(BaseModel):
    shift: float = 0.0
    scale: float = 1.0


class DistRequest(BaseModel):
    f: LatticePayload
    g: LatticePayload | None = None
    limit: LimitSpec | None = None
    p: Literal[1, 2] = 1
    affine: AffineSpec | None = None

    @model_validator(mode="after")
    def _one_target(self):
        if (self.g is None) == (self.limit is None):
            raise ValueError("provide exactly one of g (discrete) or limit (continuous)")
        return self


class DistResponse(BaseModel):
    value: float
    p: int
    method: str
    error_bound: float


class ModelInfo(BaseModel):
    name: str
    description: str = ""
    params: dict
    negative_control: bool = False


class ModelsResponse(BaseModel):
    models: list[ModelInfo]


class CacheEntry(BaseModel):
    file: str
    n: int | None = None
    version: int | None = None
    bytes: int | None = None
    model: dict | None = None
    error: str | None = None


class CacheListResponse(BaseModel):
    directory: str
    entries: list[CacheEntry]


class CacheCleanResponse(BaseModel):
    directory: str
    removed: int


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    detail: str
    kind: Literal["config", "numeric"] = "config"


__all__ = [
    "AffineSpec", "BoundsConfig", "BoundsReportModel", "CacheCleanResponse",
    "CacheEntry", "CacheListResponse", "ConvergenceResult", "DistRequest",
    "DistResponse", "ErrorBody", "ExperimentConfig", "HealthResponse",
    "LatticePayload", "LimitSpec", "McConfig", "McResult", "ModelInfo",
    "ModelsResponse",
]
