"""FastAPI application exposing the simulator and optimizer."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import ConfigError
from . import ops
from .schemas import (CampaignRequest, CampaignResponse, HealthResponse,
                      PreviewRequest, PreviewResponse, SolveRequest,
                      SolveResponse, ValidateRequest, ValidateResponse)


def create_app() -> FastAPI:
    app = FastAPI(title="isacnet",
                  description="Power allocation for monostatic-sensing ISAC "
                              "networks: simulator, optimizer and oracles.",
                  version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=SolveResponse)
    def solve(req: SolveRequest) -> SolveResponse:
        try:
            return ops.run_solve(req)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/campaign", response_model=CampaignResponse)
    def campaign(req: CampaignRequest) -> CampaignResponse:
        try:
            return ops.run_campaign_request(req)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            return ops.run_validation(req)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/scenario/preview", response_model=PreviewResponse)
    def preview(req: PreviewRequest) -> PreviewResponse:
        try:
            return ops.run_preview(req)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
