"""Pre-training corpus construction for the one-stage metric.

Candidate summaries arrive from files or a generation service; each one is
scored against its reference, either by the two-stage pipeline (the primary
training signal) or by mean lexical overlap (an ablation signal), and the
records are emitted as line-delimited JSON shards for the trainer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .backends import CheckerBackend, ExtractorBackend
from .errors import ScoringError, ValidationError
from .pipeline import two_stage_recall
from .rouge import rouge_avg

__all__ = [
    "PretrainRecord",
    "SCORERS",
    "build_corpus",
    "load_corpus",
    "write_corpus",
]

SCORERS = ("two_stage", "rouge_avg")
SHARD_SIZE = 10_000


@dataclass(frozen=True)
class PretrainRecord:
    """One regression training pair: a candidate, its reference, the target."""

    example_id: str
    reference: str
    candidate: str
    candidate_rank: int
    target_score: float
    scorer: str

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "reference": self.reference,
            "candidate": self.candidate,
            "candidate_rank": self.candidate_rank,
            "target_score": self.target_score,
            "scorer": self.scorer,
        }


def build_corpus(candidates: Mapping[str, Sequence[str]],
                 references: Mapping[str, str],
                 scorer: str = "two_stage",
                 extractor: ExtractorBackend | None = None,
                 checker: CheckerBackend | None = None,
                 aggregate: str = "label") -> list[PretrainRecord]:
    """Score every candidate against its reference into training records.

    With ``scorer="two_stage"`` the target is the unit-level recall of the
    candidate w.r.t. the reference (units extracted from the reference,
    checked in the candidate); ``scorer="rouge_avg"`` targets the mean
    R-1/R-2/R-L F1 instead. Output is ordered by (example_id, rank), where
    rank preserves each candidate list's order.
    """
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}; expected one of {SCORERS}")
    if scorer == "two_stage" and (extractor is None or checker is None):
        raise ValueError("two_stage scoring needs an extractor and a checker")

    for example_id in candidates:
        if example_id not in references:
            raise ValidationError(
                f"example '{example_id}' has candidates but no reference")
        if not candidates[example_id]:
            raise ValidationError(
                f"example '{example_id}' has an empty candidate list")

    records: list[PretrainRecord] = []
    for example_id in sorted(candidates):
        reference = references[example_id]
        for rank, candidate in enumerate(candidates[example_id]):
            try:
                if scorer == "two_stage":
                    target = two_stage_recall(
                        reference, candidate, extractor, checker,
                        origin=example_id).value(aggregate)
                else:
                    target = rouge_avg(candidate, reference)
            except ScoringError:
                raise
            except Exception as e:
                raise ScoringError(example_id, f"rank {rank}", str(e)) from e
            if not 0.0 <= target <= 1.0:
                raise ScoringError(example_id, f"rank {rank}",
                                   f"target score {target} outside [0, 1]")
            records.append(PretrainRecord(
                example_id=example_id, reference=reference,
                candidate=candidate, candidate_rank=rank,
                target_score=target, scorer=scorer))
    return records


def write_corpus(records: Sequence[PretrainRecord], out_dir: str | Path,
                 prefix: str = "pretrain",
                 shard_size: int = SHARD_SIZE) -> list[Path]:
    """Write records as JSONL shards of ``shard_size`` lines each.

    Output bytes depend only on the records, so identical inputs reproduce
    identical shard files.
    """
    if shard_size < 1:
        raise ValueError("shard_size must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    for shard_index in range(0, max(1, (len(records) + shard_size - 1) // shard_size)):
        shard = records[shard_index * shard_size:(shard_index + 1) * shard_size]
        path = out_dir / f"{prefix}-{shard_index:05d}.jsonl"
        with path.open("w", encoding="utf-8") as f:
            for record in shard:
                f.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        paths.append(path)
    return paths


def load_corpus(paths: Sequence[str | Path]) -> list[PretrainRecord]:
    records: list[PretrainRecord] = []
    for path in paths:
        with Path(path).open("r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                d = json.loads(line)
                records.append(PretrainRecord(
                    example_id=d["example_id"], reference=d["reference"],
                    candidate=d["candidate"],
                    candidate_rank=int(d["candidate_rank"]),
                    target_score=float(d["target_score"]),
                    scorer=d["scorer"]))
    return records
