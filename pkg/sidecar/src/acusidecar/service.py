"""HTTP service exposing extraction, checking, scoring, and generation.

One app hosts every endpoint; which backend answers is configuration. Stub
mode is fully deterministic and model-free. Model mode loads trained
artifacts for scoring (and optionally checking); extraction and generation
stay rule-based, since training a production-scale extractor is out of
scope here.

Malformed requests get 4xx responses with field diagnostics (request
validation); unexpected backend failures get a 5xx carrying an opaque error
id that is also written to the service log.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import stub
from .checker import CheckerModel, load_checker
from .onestage import OneStageModel, load_one_stage
from .wire import (EntailBatchRequest, EntailBatchResponse, EntailRequest,
                   EntailResponse, ExtractRequest, ExtractResponse,
                   GenerateRequest, GenerateResponse, HealthResponse,
                   ScoreRequest, ScoreResponse)

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    mode: str = "stub"  # "stub" or "model"
    one_stage_checkpoint: str | None = None
    checker_checkpoint: str | None = None
    device: str = "cpu"


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if config.mode not in ("stub", "model"):
        raise ValueError(f"unknown service mode {config.mode!r}")

    one_stage: OneStageModel | None = None
    checker: CheckerModel | None = None
    if config.mode == "model":
        if config.one_stage_checkpoint:
            one_stage = load_one_stage(config.one_stage_checkpoint)
        if config.checker_checkpoint:
            checker = load_checker(config.checker_checkpoint)
        if one_stage is None and checker is None:
            raise ValueError("model mode needs at least one checkpoint")

    app = FastAPI(title="acu-sidecar")

    @app.exception_handler(Exception)
    async def unexpected_failure(request: Request, exc: Exception):
        error_id = uuid.uuid4().hex
        logger.exception("request %s failed [%s]", request.url.path, error_id)
        return JSONResponse(status_code=500, content={"error_id": error_id})

    def entail_one(item: EntailRequest) -> EntailResponse:
        if checker is not None:
            label, probability = checker.predict(item.premise, item.hypothesis,
                                                 item.context)
        else:
            label, probability = stub.stub_entail(item.premise, item.hypothesis,
                                                  item.context)
        return EntailResponse(label=label, probability=probability)

    @app.get("/v1/health", response_model=HealthResponse)
    async def health():
        models = [
            "extract:stub",
            f"entail:{'model' if checker else 'stub'}",
            f"score:{'model' if one_stage else 'stub'}",
            "generate:stub",
        ]
        return HealthResponse(status="ok", models=models)

    @app.post("/v1/extract", response_model=ExtractResponse)
    async def extract(request: ExtractRequest):
        return ExtractResponse(acus=[stub.stub_extract(t) for t in request.texts])

    @app.post("/v1/entail",
              response_model=EntailBatchResponse | EntailResponse)
    async def entail(request: EntailBatchRequest | EntailRequest):
        if isinstance(request, EntailBatchRequest):
            return EntailBatchResponse(
                results=[entail_one(item) for item in request.items])
        return entail_one(request)

    @app.post("/v1/score", response_model=ScoreResponse)
    async def score(request: ScoreRequest):
        if one_stage is not None:
            value = one_stage.score(request.candidate, request.reference,
                                    request.direction)
        else:
            value = stub.stub_score(request.candidate, request.reference,
                                    request.direction)
        return ScoreResponse(score=min(1.0, max(0.0, value)))

    @app.post("/v1/generate", response_model=GenerateResponse)
    async def generate(request: GenerateRequest):
        return GenerateResponse(
            candidates=stub.stub_generate(request.source,
                                          request.num_candidates))

    return app
