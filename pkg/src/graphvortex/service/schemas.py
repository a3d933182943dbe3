"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class VertexModel(BaseModel):
    id: str
    mu: float = Field(..., description="vertex measure, strictly positive")


class EdgeModel(BaseModel):
    source: str
    target: str
    weight: float = Field(..., description="edge weight, strictly positive")


class GraphModel(BaseModel):
    vertices: list[VertexModel]
    edges: list[EdgeModel]


class VortexEntry(BaseModel):
    vertex: str
    multiplicity: int = 1


class SolveOptions(BaseModel):
    tol: float = 1e-10
    max_iters: int = 10000
    k_margin: float = 1.0
    oracle: Literal["none", "newton"] = "none"


class GenerateRequest(BaseModel):
    kind: Literal["path", "cycle", "complete", "grid2d", "random_gnp"]
    n: Optional[int] = None
    rows: Optional[int] = None
    cols: Optional[int] = None
    p: Optional[float] = None
    seed: int = 0
    weight: float = 1.0
    measure: float = 1.0


class GenerateResponse(BaseModel):
    graph: GraphModel
    vertex_count: int
    edge_count: int
    total_volume: float


class CheckRequest(BaseModel):
    graph: GraphModel
    vortices: list[VortexEntry]


class CheckResponse(BaseModel):
    volume: float
    four_pi_n: float
    margin: float
    solvable: bool


class SolveRequest(BaseModel):
    graph: GraphModel
    vortices: list[VortexEntry]
    options: SolveOptions = SolveOptions()


class SolveResponse(BaseModel):
    status: Literal["solved", "no_solution"]
    margin: float
    u: Optional[dict[str, float]] = None
    exp_u: Optional[dict[str, float]] = None
    residual_sup: Optional[float] = None
    integral_gap: Optional[float] = None
    iterations: Optional[int] = None
    k_used: Optional[float] = None
    oracle_sup_diff: Optional[float] = None


class SweepRequest(BaseModel):
    graph: GraphModel
    vertex: str
    n_max: int
    options: SolveOptions = SolveOptions()


class SweepRow(BaseModel):
    n: int
    four_pi_n: float
    margin: float
    verdict: Literal["SOLVABLE", "NO_SOLUTION"]
    iterations: Optional[int] = None
    min_u: Optional[float] = None
    max_u: Optional[float] = None


class SweepResponse(BaseModel):
    rows: list[SweepRow]
