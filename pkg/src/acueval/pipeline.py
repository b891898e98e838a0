"""Two-stage evaluation: extract content units, check them, aggregate.

Stage one turns text ``s1`` into atomic content units; stage two checks each
unit against text ``s2``; the recall score is the fraction of units judged
present. Every result carries the full per-unit audit trail, so any
aggregated number can be traced back to individual unit decisions. The F1
variant combines the two directional recalls by harmonic mean.

Corpus scoring batches this over a benchmark: one extraction per reference,
reused across all systems, with per-stage wall-clock recorded.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .backends import ACU_DELIMITER, CheckerBackend, ExtractorBackend
from .errors import BackendError, ExtractionError, ScoringError, ValidationError
from .tokenizer import content_tokens
from .types import Acu, EntailmentJudgment, EvalExample, ScoreMatrix, harmonic_mean

__all__ = [
    "AuditEntry",
    "CorpusResult",
    "StageTiming",
    "TwoStageResult",
    "check_acu",
    "check_acus",
    "extract_acus",
    "score_corpus",
    "score_corpus_one_stage",
    "two_stage_f1",
    "two_stage_recall",
    "write_audit_jsonl",
]

# Audit-entry direction tags: which text the units came from and which text
# they were checked against.
REF_TO_CAND = "ref_acus_in_candidate"
CAND_TO_REF = "cand_acus_in_reference"


def extract_acus(text: str, backend: ExtractorBackend,
                 origin: str = "") -> list[Acu]:
    """Run the extractor on ``text`` and split its output into units.

    The generated sequence is split on the unit sentinel; fragments are
    trimmed, and fragments that are empty (or carry no content token, which
    could never form a valid unit) are dropped, order preserved. Zero
    surviving units is an error, never a silent empty result.
    """
    if not text.strip():
        raise ValueError("cannot extract content units from empty text")
    try:
        sequence = backend.generate(text)
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(backend.name, f"generation failed: {e}") from e
    fragments = [p.strip() for p in sequence.split(ACU_DELIMITER)]
    fragments = [p for p in fragments if p and content_tokens(p)]
    if not fragments:
        raise ExtractionError(
            f"backend '{backend.name}' produced no usable content units "
            f"for text {text[:60]!r}")
    prefix = f"{origin}#" if origin else ""
    return [Acu(acu_id=f"{prefix}a{i}", text=frag, origin_example=origin)
            for i, frag in enumerate(fragments)]


def check_acu(target: str, acu: Acu, backend: CheckerBackend,
              source: str | None = None) -> EntailmentJudgment:
    """Judge one unit against ``target``.

    ``source`` is the text the unit came from; contextual checkers require
    it, standard checkers ignore it.
    """
    if backend.mode == "contextual" and source is None:
        raise ValueError(
            f"checker '{backend.name}' runs in contextual mode and needs "
            f"the unit's source text")
    try:
        return backend.check(target, acu, source)
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(backend.name, f"check failed: {e}") from e


def check_acus(target: str, acus: Sequence[Acu], backend: CheckerBackend,
               source: str | None = None) -> list[EntailmentJudgment]:
    """Judge several units against one target in a single backend call.

    Same contract as :func:`check_acu`; remote backends answer with one
    batched request, order preserved.
    """
    if backend.mode == "contextual" and source is None:
        raise ValueError(
            f"checker '{backend.name}' runs in contextual mode and needs "
            f"the unit's source text")
    try:
        judgments = backend.check_batch(target, list(acus), source)
    except BackendError:
        raise
    except Exception as e:
        raise BackendError(backend.name, f"check failed: {e}") from e
    if len(judgments) != len(acus):
        raise BackendError(backend.name,
                           f"returned {len(judgments)} judgments for "
                           f"{len(acus)} units")
    return judgments


@dataclass(frozen=True)
class TwoStageResult:
    """Units, per-unit judgments, and their aggregation for one direction.

    ``recall`` is always the label mean; ``mean_probability`` is the
    probability-aggregation alternative (kept alongside so switching the
    aggregation mode never discards the audit trail).
    """

    acus: tuple[Acu, ...]
    judgments: tuple[EntailmentJudgment, ...]
    recall: float
    mean_probability: float

    def value(self, aggregate: str = "label") -> float:
        if aggregate == "label":
            return self.recall
        if aggregate == "probability":
            return self.mean_probability
        raise ValueError(f"unknown aggregation mode {aggregate!r}")


def two_stage_recall(s1: str, s2: str, extractor: ExtractorBackend,
                     checker: CheckerBackend, origin: str = "") -> TwoStageResult:
    """Recall of ``s2`` w.r.t. ``s1``: extract units from ``s1``, check each
    against ``s2``, return the fraction judged present."""
    if not s1.strip() or not s2.strip():
        raise ValueError("both text sequences must be non-empty")
    acus = extract_acus(s1, extractor, origin=origin)
    judgments = tuple(check_acus(s2, acus, checker, source=s1))
    labels = [j.label for j in judgments]
    probs = [j.probability for j in judgments]
    return TwoStageResult(
        acus=tuple(acus),
        judgments=judgments,
        recall=sum(labels) / len(labels),
        mean_probability=sum(probs) / len(probs),
    )


def two_stage_f1(s1: str, s2: str, extractor: ExtractorBackend,
                 checker: CheckerBackend, aggregate: str = "label") -> float:
    """Harmonic mean of the two directional recalls; 0 when both are 0."""
    forward = two_stage_recall(s1, s2, extractor, checker).value(aggregate)
    backward = two_stage_recall(s2, s1, extractor, checker).value(aggregate)
    return harmonic_mean(forward, backward)


@dataclass(frozen=True)
class AuditEntry:
    """One unit-level decision inside a corpus run."""

    example_id: str
    system_id: str
    acu_text: str
    label: int
    probability: float
    contextual: bool
    direction: str = REF_TO_CAND

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "system_id": self.system_id,
            "acu_text": self.acu_text,
            "label": self.label,
            "probability": self.probability,
            "contextual": self.contextual,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class StageTiming:
    """Accumulated seconds spent per pipeline stage."""

    extract_seconds: float
    check_seconds: float
    one_stage_seconds: float | None
    wall_seconds: float

    def to_dict(self) -> dict:
        return {
            "stage1_extract_seconds": self.extract_seconds,
            "stage2_check_seconds": self.check_seconds,
            "one_stage_seconds": self.one_stage_seconds,
            "wall_seconds": self.wall_seconds,
        }


@dataclass(frozen=True)
class CorpusResult:
    """Scores for every (example, system) cell plus the full audit trail."""

    matrix: ScoreMatrix
    audit: tuple[AuditEntry, ...]
    timing: StageTiming
    metadata: dict = field(default_factory=dict)


def _validate_corpus(dataset: Sequence[EvalExample]) -> tuple[str, ...]:
    if not dataset:
        raise ValidationError("dataset is empty")
    system_ids = tuple(dataset[0].candidates.keys())
    expected = set(system_ids)
    for ex in dataset:
        if not ex.candidates:
            raise ValidationError(f"example '{ex.example_id}' has no candidates")
        if set(ex.candidates.keys()) != expected:
            raise ValidationError(
                f"ragged system sets: example '{ex.example_id}' has "
                f"{sorted(ex.candidates.keys())}, expected {sorted(expected)}")
    return system_ids


def score_corpus(dataset: Sequence[EvalExample], extractor: ExtractorBackend,
                 checker: CheckerBackend, direction: str = "recall",
                 aggregate: str = "label", workers: int = 1) -> CorpusResult:
    """Score every candidate of every example against its reference.

    ``direction="recall"`` extracts units from each reference once and checks
    them in every candidate; ``direction="f1"`` adds the reverse leg
    (candidate units checked in the reference) and combines by harmonic mean.
    Cells may be fanned out to a bounded worker pool when both backends
    accept concurrent calls; output ordering is deterministic either way.
    """
    if direction not in ("recall", "f1"):
        raise ValueError(f"unknown direction {direction!r}")
    if aggregate not in ("label", "probability"):
        raise ValueError(f"unknown aggregation mode {aggregate!r}")
    system_ids = _validate_corpus(dataset)

    wall_start = time.perf_counter()
    extract_time = 0.0
    check_time = 0.0

    # Stage 1 for references happens once per example, up front.
    ref_acus: dict[str, list[Acu]] = {}
    for ex in dataset:
        t0 = time.perf_counter()
        try:
            ref_acus[ex.example_id] = extract_acus(ex.reference, extractor,
                                                   origin=ex.example_id)
        except Exception as e:
            raise ScoringError(ex.example_id, "<reference>", str(e)) from e
        extract_time += time.perf_counter() - t0

    def score_cell(ex: EvalExample, system: str):
        candidate = ex.candidates[system]
        cell_extract = 0.0
        cell_check = 0.0
        entries: list[AuditEntry] = []

        t0 = time.perf_counter()
        forward = check_acus(candidate, ref_acus[ex.example_id], checker,
                             source=ex.reference)
        cell_check += time.perf_counter() - t0
        entries.extend(
            AuditEntry(ex.example_id, system, acu.text, j.label,
                       j.probability, j.contextual, REF_TO_CAND)
            for acu, j in zip(ref_acus[ex.example_id], forward))
        value = _aggregate(forward, aggregate)

        if direction == "f1":
            t0 = time.perf_counter()
            cand_acus = extract_acus(candidate, extractor,
                                     origin=ex.example_id)
            cell_extract += time.perf_counter() - t0
            t0 = time.perf_counter()
            backward = check_acus(ex.reference, cand_acus, checker,
                                  source=candidate)
            cell_check += time.perf_counter() - t0
            entries.extend(
                AuditEntry(ex.example_id, system, acu.text, j.label,
                           j.probability, j.contextual, CAND_TO_REF)
                for acu, j in zip(cand_acus, backward))
            value = harmonic_mean(value, _aggregate(backward, aggregate))

        return value, entries, cell_extract, cell_check

    cells = [(ex, system) for ex in dataset for system in system_ids]
    parallel = (workers > 1 and extractor.concurrent_safe
                and checker.concurrent_safe)
    results: dict[tuple[str, str], tuple] = {}
    if parallel:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {(ex.example_id, system): pool.submit(score_cell, ex, system)
                       for ex, system in cells}
        for (ex, system) in cells:
            key = (ex.example_id, system)
            try:
                results[key] = futures[key].result()
            except Exception as e:
                raise ScoringError(ex.example_id, system, str(e)) from e
    else:
        for ex, system in cells:
            try:
                results[(ex.example_id, system)] = score_cell(ex, system)
            except ScoringError:
                raise
            except Exception as e:
                raise ScoringError(ex.example_id, system, str(e)) from e

    values = []
    audit: list[AuditEntry] = []
    for ex in dataset:
        row = []
        for system in system_ids:
            value, entries, cell_extract, cell_check = results[(ex.example_id, system)]
            row.append(value)
            audit.extend(entries)
            extract_time += cell_extract
            check_time += cell_check
        values.append(row)

    matrix = ScoreMatrix([ex.example_id for ex in dataset], system_ids, values)
    timing = StageTiming(extract_seconds=extract_time,
                         check_seconds=check_time,
                         one_stage_seconds=None,
                         wall_seconds=time.perf_counter() - wall_start)
    metadata = {
        "extractor": extractor.name,
        "checker": checker.name,
        "checker_mode": checker.mode,
        "checker_threshold": checker.threshold,
        "direction": direction,
        "aggregate": aggregate,
    }
    return CorpusResult(matrix=matrix, audit=tuple(audit), timing=timing,
                        metadata=metadata)


def _aggregate(judgments: Sequence[EntailmentJudgment], aggregate: str) -> float:
    if aggregate == "probability":
        return sum(j.probability for j in judgments) / len(judgments)
    return sum(j.label for j in judgments) / len(judgments)


def score_corpus_one_stage(dataset: Sequence[EvalExample], scorer,
                           direction: str = "recall") -> CorpusResult:
    """Score every cell with a single-pass regression scorer backend."""
    if direction not in ("recall", "f1"):
        raise ValueError(f"unknown direction {direction!r}")
    system_ids = _validate_corpus(dataset)
    wall_start = time.perf_counter()
    one_stage_time = 0.0
    values = []
    for ex in dataset:
        row = []
        for system in system_ids:
            t0 = time.perf_counter()
            try:
                row.append(scorer.score(ex.candidates[system], ex.reference,
                                        direction=direction))
            except Exception as e:
                raise ScoringError(ex.example_id, system, str(e)) from e
            one_stage_time += time.perf_counter() - t0
        values.append(row)
    matrix = ScoreMatrix([ex.example_id for ex in dataset], system_ids, values)
    timing = StageTiming(extract_seconds=0.0, check_seconds=0.0,
                         one_stage_seconds=one_stage_time,
                         wall_seconds=time.perf_counter() - wall_start)
    metadata = {"scorer": scorer.name, "direction": direction}
    return CorpusResult(matrix=matrix, audit=(), timing=timing,
                        metadata=metadata)


def write_audit_jsonl(result: CorpusResult, path: str | Path) -> None:
    """Export the per-unit audit trail as line-delimited JSON."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for entry in result.audit:
            f.write(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")
