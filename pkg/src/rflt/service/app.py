"""FastAPI application exposing the filter toolkit as a design service."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import ToolkitError
from . import handlers, models


def create_app() -> FastAPI:
    app = FastAPI(
        title="rflt design service",
        description=(
            "Reflectionless-filter synthesis, response evaluation, non-ideal "
            "modeling (delay, tolerance, mutual coupling), optimization, and "
            "one-port calibration uncertainty analysis."
        ),
        version="0.1.0",
    )

    def run(handler, req):
        try:
            return handler(req)
        except (ToolkitError, ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/synth", response_model=models.SynthResponse)
    def synth(req: models.SynthRequest):
        return run(handlers.synth, req)

    @app.post("/analyze", response_model=models.AnalyzeResponse)
    def analyze(req: models.AnalyzeRequest):
        return run(handlers.analyze, req)

    @app.post("/delay", response_model=models.DelayResponse)
    def delay(req: models.DelayRequest):
        return run(handlers.delay, req)

    @app.post("/mutual", response_model=models.MutualResponse)
    def mutual(req: models.MutualRequest):
        return run(handlers.mutual, req)

    @app.post("/windings", response_model=models.WindingsResponse)
    def windings(req: models.WindingsRequest):
        return run(handlers.windings, req)

    @app.post("/tolerance", response_model=models.ToleranceResponse)
    def tolerance(req: models.ToleranceRequest):
        return run(handlers.tolerance, req)

    @app.post("/calmc", response_model=models.CalMcResponse)
    def calmc(req: models.CalMcRequest):
        return run(handlers.calmc, req)

    @app.post("/optimize", response_model=models.OptimizeResponse)
    def optimize(req: models.OptimizeRequest):
        return run(handlers.optimize, req)

    @app.post("/noise", response_model=models.NoiseResponse)
    def noise(req: models.NoiseRequest):
        return run(handlers.noise, req)

    return app


app = create_app()
