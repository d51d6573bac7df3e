"""Request/response models for the service.

Nested mathematical descriptors (measures, maps, domains, candidates) are
carried as JSON objects and validated by the core parsers, which own the
actual invariants; the models here pin the envelope shapes and defaults.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    grid_size: int = 1024
    z_samples: int = 100
    seed: int = 0
    tol_face: float = 1e-7
    tol_sign: float = 1e-9
    threads: Optional[int] = None


class DecomposeRequest(BaseModel):
    measure: dict


class DecomposeResponse(BaseModel):
    g: dict
    nu: list[dict]
    rho: list[list[float]]


class AtomSpec(BaseModel):
    angle: float
    weight: list[float]


class ComponentAtomSpec(BaseModel):
    angle: float
    alpha: float


class ConstructRequest(BaseModel):
    domain: dict
    h: dict
    atoms: list[AtomSpec] = Field(default_factory=list)
    im0: Optional[list[float]] = None
    ray_param: float = 0.0
    segment_param: float = 0.5


class ConstructDnRequest(BaseModel):
    domain: dict
    h: dict
    atom_spec: list[Optional[ComponentAtomSpec]] = Field(default_factory=list)
    im0: Optional[list[float]] = None
    ray_param: float = 0.0
    segment_param: float = 0.5


class ConstructHalfplaneRequest(BaseModel):
    domain: dict
    h: dict
    atom: Optional[ComponentAtomSpec] = None
    im0: Optional[list[float]] = None
    ray_param: float = 0.0
    segment_param: float = 0.5


class CandidateResponse(BaseModel):
    candidate: dict


class VerifyRequest(BaseModel):
    candidate: dict
    config: RunConfig = Field(default_factory=RunConfig)


class VerifyResponse(BaseModel):
    report: dict


class EvalRequest(BaseModel):
    candidate: dict
    lambda_grid: Union[str, list[list[float]]] = "polar:16x8"
    rel_tol: float = 1e-9


class EvalResponse(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class ReduceRequest(BaseModel):
    candidate: dict


class ReduceResponse(BaseModel):
    matrix: list[list[float]]
    rank: int
    candidate: dict


class GapqRequest(BaseModel):
    a: float
    p: float
    q: float
    psi_auto: Optional[dict] = None
    beta: float = 0.0
    b1: Optional[dict] = None
    b2: Optional[dict] = None


class ExtremalResponse(BaseModel):
    candidate: dict


class LiftRequest(BaseModel):
    candidate: dict
    sigma: list[float]


class LiftResponse(BaseModel):
    values: list[list[float]]
    moduli: list[float]


class LempertRequest(BaseModel):
    candidate: dict
    sigma1: list[float]
    sigma2: list[float]
    config: Optional[RunConfig] = None


class KobayashiRequest(BaseModel):
    candidate: dict
    sigma: list[float]
    config: Optional[RunConfig] = None


class MetricResponse(BaseModel):
    record: dict


class ErrorResponse(BaseModel):
    error: str
    kind: str


def config_kwargs(config: Optional[RunConfig]) -> dict[str, Any]:
    cfg = config or RunConfig()
    return {
        "grid_size": cfg.grid_size,
        "z_samples": cfg.z_samples,
        "seed": cfg.seed,
        "tol_face": cfg.tol_face,
        "tol_sign": cfg.tol_sign,
        "threads": cfg.threads,
    }
