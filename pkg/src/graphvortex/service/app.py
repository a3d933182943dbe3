"""HTTP front end wrapping the solver library.

Run with:  uvicorn graphvortex.service.app:app

Solves are stateless and deterministic, so the endpoints are safe to call
concurrently.  Input problems (bad graphs, unknown vertices, malformed
specs) map to 422; a numerical failure maps to 500.  A provably unsolvable
configuration is a regular 200 answer with status "no_solution", since the
verdict is part of the theory, not an error.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from ..errors import GraphVortexError, MaxItersExceeded, NoSolution, SolverDivergence
from ..generators import GraphSpec, build
from ..graph import WeightedGraph, validate_graph
from ..linalg import LinearSolveSettings
from ..solver import (
    FOUR_PI,
    SolverSettings,
    VortexConfig,
    existence_check,
    newton_oracle,
    resolve_source,
    solve,
)
from .schemas import (
    CheckRequest,
    CheckResponse,
    EdgeModel,
    GenerateRequest,
    GenerateResponse,
    GraphModel,
    SolveOptions,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
    SweepRow,
    VertexModel,
)


def _graph_from_model(model: GraphModel) -> WeightedGraph:
    try:
        return validate_graph(
            [(v.id, v.mu) for v in model.vertices],
            [(e.source, e.target, e.weight) for e in model.edges],
        )
    except GraphVortexError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _graph_to_model(graph: WeightedGraph) -> GraphModel:
    return GraphModel(
        vertices=[VertexModel(id=v, mu=float(m))
                  for v, m in zip(graph.vertices, graph.measure)],
        edges=[EdgeModel(source=a, target=b, weight=float(w))
               for a, b, w in graph.iter_edges()],
    )


def _vortices_from(entries, graph: WeightedGraph) -> VortexConfig:
    try:
        config = VortexConfig(tuple((e.vertex, e.multiplicity) for e in entries))
        config.indices(graph)
        return config
    except GraphVortexError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _settings_from(options: SolveOptions) -> SolverSettings:
    try:
        return SolverSettings(
            conv_tol=options.tol,
            max_iters=options.max_iters,
            k_margin=options.k_margin,
            linear=LinearSolveSettings(),
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="graphvortex",
        description="vortex equation solver on weighted finite graphs",
        version="0.1.0",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/graphs/generate", response_model=GenerateResponse)
    def generate(request: GenerateRequest) -> GenerateResponse:
        spec = GraphSpec(kind=request.kind, n=request.n, rows=request.rows,
                         cols=request.cols, p=request.p, seed=request.seed,
                         weight=request.weight, measure=request.measure)
        try:
            graph = build(spec)
        except GraphVortexError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return GenerateResponse(
            graph=_graph_to_model(graph),
            vertex_count=graph.vertex_count,
            edge_count=graph.edge_count,
            total_volume=graph.total_volume,
        )

    @app.post("/check", response_model=CheckResponse)
    def check(request: CheckRequest) -> CheckResponse:
        graph = _graph_from_model(request.graph)
        vortices = _vortices_from(request.vortices, graph)
        margin = existence_check(graph, vortices)
        return CheckResponse(
            volume=graph.total_volume,
            four_pi_n=FOUR_PI * vortices.total_n,
            margin=margin,
            solvable=margin > 0.0,
        )

    @app.post("/solve", response_model=SolveResponse, response_model_exclude_none=True)
    def solve_endpoint(request: SolveRequest) -> SolveResponse:
        graph = _graph_from_model(request.graph)
        vortices = _vortices_from(request.vortices, graph)
        settings = _settings_from(request.options)
        try:
            report = solve(graph, vortices, settings)
        except NoSolution as exc:
            return SolveResponse(status="no_solution", margin=float(exc.margin))
        except (MaxItersExceeded, SolverDivergence) as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        u = report.solution.values
        oracle_gap = None
        if request.options.oracle == "newton":
            source = resolve_source(graph, settings)
            check_v = newton_oracle(graph, report.background, source,
                                    vortices.total_n, settings)
            oracle_gap = float(np.max(np.abs(
                check_v.values - report.regular_part.values
            )))
        return SolveResponse(
            status="solved",
            margin=report.existence_margin,
            u={v: float(u[i]) for i, v in enumerate(graph.vertices)},
            exp_u={v: float(np.exp(u[i])) for i, v in enumerate(graph.vertices)},
            residual_sup=report.residual_sup,
            integral_gap=report.integral_gap,
            iterations=report.trace.iterations,
            k_used=report.k_used,
            oracle_sup_diff=oracle_gap,
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        graph = _graph_from_model(request.graph)
        try:
            graph.index_of(request.vertex)
        except GraphVortexError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if request.n_max < 1:
            raise HTTPException(status_code=422, detail="n_max must be at least 1")
        settings = _settings_from(request.options)
        rows = []
        for n in range(1, request.n_max + 1):
            vortices = VortexConfig(((request.vertex, n),))
            margin = existence_check(graph, vortices)
            if margin <= 0.0:
                rows.append(SweepRow(n=n, four_pi_n=FOUR_PI * n, margin=margin,
                                     verdict="NO_SOLUTION"))
                continue
            try:
                report = solve(graph, vortices, settings)
            except (MaxItersExceeded, SolverDivergence) as exc:
                raise HTTPException(status_code=500, detail=str(exc)) from exc
            u = report.solution.values
            rows.append(SweepRow(
                n=n, four_pi_n=FOUR_PI * n, margin=margin, verdict="SOLVABLE",
                iterations=report.trace.iterations,
                min_u=float(np.min(u)), max_u=float(np.max(u)),
            ))
        return SweepResponse(rows=rows)

    return app


app = create_app()
