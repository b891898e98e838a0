"""Wire schema: serialize/parse round-trips and field validation."""

import pytest
from pydantic import ValidationError

from acusidecar.wire import (EntailBatchRequest, EntailBatchResponse,
                             EntailRequest, EntailResponse, ExtractRequest,
                             ExtractResponse, GenerateRequest,
                             GenerateResponse, HealthResponse, ScoreRequest,
                             ScoreResponse)

ROUND_TRIP_CASES = [
    ExtractRequest(texts=["one text", "another"]),
    ExtractResponse(acus=[["unit a", "unit b"], ["unit c"]]),
    EntailRequest(premise="p text", hypothesis="h text"),
    EntailRequest(premise="p", hypothesis="h", context="c"),
    EntailBatchRequest(items=[EntailRequest(premise="p", hypothesis="h")]),
    EntailResponse(label=1, probability=0.9),
    EntailBatchResponse(results=[EntailResponse(label=0, probability=0.1)]),
    ScoreRequest(candidate="c", reference="r"),
    ScoreRequest(candidate="c", reference="r", direction="f1"),
    ScoreResponse(score=0.5),
    GenerateRequest(source="s", num_candidates=3),
    GenerateResponse(candidates=["one", "two"]),
    HealthResponse(status="ok", models=["score:stub"]),
]


@pytest.mark.parametrize("message", ROUND_TRIP_CASES,
                         ids=lambda m: type(m).__name__)
def test_round_trip_identity(message):
    wire = message.model_dump_json()
    assert type(message).model_validate_json(wire) == message


def test_probability_bounds_enforced():
    with pytest.raises(ValidationError):
        EntailResponse(label=1, probability=1.5)
    with pytest.raises(ValidationError):
        ScoreResponse(score=-0.1)


def test_label_must_be_binary():
    with pytest.raises(ValidationError):
        EntailResponse(label=2, probability=0.5)


def test_direction_enum():
    with pytest.raises(ValidationError):
        ScoreRequest(candidate="c", reference="r", direction="precision")


def test_num_candidates_bounds():
    with pytest.raises(ValidationError):
        GenerateRequest(source="s", num_candidates=0)
