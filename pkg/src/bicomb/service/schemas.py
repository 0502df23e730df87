"""Request/response envelopes. Deep validation of construction specs
(metric axioms, extremality, weight sums) lives in the registry; these
models pin the envelope: field types, positivity, and no stray keys."""
from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps: float = Field(default=1e-8, gt=0)
    samples: int = Field(default=200, gt=0)
    grid: int = Field(default=120, gt=0)
    seed: int = Field(default=0, ge=0)
    budget: int = Field(default=200, gt=0)
    n: Optional[int] = Field(default=None, gt=0)


class W1Request(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: Optional[dict] = None
    mu: dict
    nu: dict
    config: RunConfig = RunConfig()


class TightspanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: dict
    config: RunConfig = RunConfig()


class BarycenterRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: Optional[dict] = None
    measure: dict
    bicombing: Optional[dict] = None
    config: RunConfig = RunConfig()


class HalfplaneDemoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = RunConfig()


class DossRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: Optional[dict] = None
    measure: dict
    point: Optional[Any] = None
    config: RunConfig = RunConfig()


class CertifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bicombing: dict
    space: Optional[dict] = None
    config: RunConfig = RunConfig()


class ImproveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bicombing: Optional[dict] = None
    space: Optional[dict] = None
    config: RunConfig = RunConfig()


class ExtendRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: dict
    bicombing: Optional[dict] = None
    config: RunConfig = RunConfig()


class ReportDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    status: str
    exit_code: int
    config: dict
    results: dict
    notes: list = []
