"""Request and response models for the HTTP service."""

from typing import List, Optional

from pydantic import BaseModel, Field


class MetricRequest(BaseModel):
    body: str = Field(description="builtin name or body spec text")
    p: List[float]
    q: Optional[List[float]] = None
    X: Optional[List[float]] = None
    nodes: int = 64


class MetricResponse(BaseModel):
    spec_hash: str
    F: Optional[float] = None
    C: Optional[float] = None
    P_plus: Optional[float] = None
    P_minus: Optional[float] = None
    hilbert: Optional[float] = None
    integrated: Optional[float] = None


class SqueezeRequest(BaseModel):
    body: str
    z: List[float]
    budget: int = 2000
    seed: int = 0


class WitnessInfo(BaseModel):
    matrix: List[List[float]]
    r_in: float
    r_out: float
    certificate: dict


class SqueezeResponse(BaseModel):
    spec_hash: str
    lower: float
    upper: Optional[float] = None
    method: str
    reason: str = ""
    witness: Optional[WitnessInfo] = None


class ExperimentRequest(BaseModel):
    seed: int = 0
    workers: int = 1
    timing: bool = False
    budget: Optional[int] = None
    body: Optional[str] = None
    n_bodies: Optional[int] = None
    n_points: Optional[int] = None
    direction_samples: Optional[int] = None
    dists: Optional[List[float]] = None
    js: Optional[List[int]] = None


class ExperimentResponse(BaseModel):
    experiment: str
    seed: int
    columns: List[str]
    n_rows: int
    csv: str


class ValidateRequest(BaseModel):
    spec: str


class ValidateResponse(BaseModel):
    ok: bool
    kind: str
    dim: int
    spec_hash: str
    bounded: bool


class HealthResponse(BaseModel):
    status: str
    version: str
