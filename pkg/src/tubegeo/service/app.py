"""FastAPI application exposing the geodesy operations."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import TubeGeoError
from . import handlers
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(
        title="tubegeo",
        description=(
            "Complex geodesics of convex tube domains from boundary measures: "
            "decomposition, construction, verification, evaluation, and "
            "Reinhardt-domain extremal lifts."
        ),
        version=__version__,
    )

    @app.exception_handler(TubeGeoError)
    async def domain_error_handler(request: Request, exc: TubeGeoError):
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "kind": type(exc).__name__},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "kind": "ValueError"},
        )

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/decompose", response_model=sc.DecomposeResponse)
    async def decompose(req: sc.DecomposeRequest):
        return handlers.decompose_op(req)

    @app.post("/construct", response_model=sc.CandidateResponse)
    async def construct(req: sc.ConstructRequest):
        return handlers.construct_op(req)

    @app.post("/construct-dn", response_model=sc.CandidateResponse)
    async def construct_dn(req: sc.ConstructDnRequest):
        return handlers.construct_dn_op(req)

    @app.post("/construct-halfplane", response_model=sc.CandidateResponse)
    async def construct_halfplane(req: sc.ConstructHalfplaneRequest):
        return handlers.construct_halfplane_op(req)

    @app.post("/verify", response_model=sc.VerifyResponse)
    async def verify(req: sc.VerifyRequest):
        return handlers.verify_op(req)

    @app.post("/eval", response_model=sc.EvalResponse)
    async def evaluate(req: sc.EvalRequest):
        return handlers.eval_op(req)

    @app.post("/reduce", response_model=sc.ReduceResponse)
    async def reduce(req: sc.ReduceRequest):
        return handlers.reduce_op(req)

    @app.post("/reinhardt/gapq", response_model=sc.ExtremalResponse)
    async def reinhardt_gapq(req: sc.GapqRequest):
        return handlers.gapq_op(req)

    @app.post("/reinhardt/lift", response_model=sc.LiftResponse)
    async def reinhardt_lift(req: sc.LiftRequest):
        return handlers.lift_op(req)

    @app.post("/reinhardt/lempert", response_model=sc.MetricResponse)
    async def reinhardt_lempert(req: sc.LempertRequest):
        return handlers.lempert_op(req)

    @app.post("/reinhardt/kobayashi", response_model=sc.MetricResponse)
    async def reinhardt_kobayashi(req: sc.KobayashiRequest):
        return handlers.kobayashi_op(req)

    return app


app = create_app()
