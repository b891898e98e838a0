"""Wire schema for the HTTP service.

All request/response bodies are JSON; batch responses preserve request
order, probabilities live in [0, 1], and scores are clamped into [0, 1]
before leaving the service.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class ExtractRequest(BaseModel):
    texts: list[str]


class ExtractResponse(BaseModel):
    acus: list[list[str]]


class EntailRequest(BaseModel):
    premise: str
    hypothesis: str
    context: str | None = None


class EntailBatchRequest(BaseModel):
    items: list[EntailRequest]


class EntailResponse(BaseModel):
    label: Literal[0, 1]
    probability: float = Field(ge=0.0, le=1.0)


class EntailBatchResponse(BaseModel):
    results: list[EntailResponse]


class ScoreRequest(BaseModel):
    candidate: str
    reference: str
    direction: Literal["recall", "f1"] = "recall"


class ScoreResponse(BaseModel):
    score: float = Field(ge=0.0, le=1.0)


class GenerateRequest(BaseModel):
    source: str
    num_candidates: int = Field(default=4, ge=1, le=64)


class GenerateResponse(BaseModel):
    candidates: list[str]


class HealthResponse(BaseModel):
    status: str
    models: list[str]
