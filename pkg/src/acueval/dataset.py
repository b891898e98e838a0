"""Dataset ingestion, validation, and serialization.

The canonical record format is line-delimited JSON with the toolkit's own
field names (see :func:`load_dataset`); an import adapter maps the public
benchmark release schema onto it. Text is stored exactly as received; any
normalization happens inside the tokenizers. Score matrices travel as CSV
with a ``doc_id,<sys1>,<sys2>,...`` header.

Loading is single-threaded; everything returned is immutable afterward.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError, ValidationError
from .types import Acu, DatasetSummary, EvalExample, ScoreMatrix

__all__ = [
    "DATASET_FORMATS",
    "dataset_stats",
    "load_dataset",
    "load_score_csv",
    "save_dataset",
    "save_score_csv",
]

DATASET_FORMATS = ("rose-jsonl", "rose-release", "score-csv")

# Field mapping for the public benchmark release layout. Kept in one place so
# a differing release revision only requires touching this table.
_RELEASE_FIELDS = {
    "example_id": "example_id",
    "source": "source",
    "reference": "reference",
    "candidates": "system_outputs",
    "gold_acus": "reference_acus",
    "annotations": "annotations",
    "label_key": "acu_labels",
    "normalized_key": "normalized_acu",
}


def load_dataset(path: str | Path, format: str = "rose-jsonl"):
    """Load a dataset file, validating every record invariant.

    ``rose-jsonl`` is the canonical record schema::

        {"example_id": ..., "source": ..., "reference": ...,
         "candidates": {system: text},
         "gold_acus": [text, ...] | null,
         "gold_labels": {system: [0/1, ...]} | null,
         "normalized_score": {system: float} | null}

    ``rose-release`` applies the import adapter for the public release
    layout. ``score-csv`` returns a :class:`ScoreMatrix` instead of examples.
    Violations are reported with the offending line number.
    """
    path = Path(path)
    if format == "score-csv":
        return load_score_csv(path)
    if format not in ("rose-jsonl", "rose-release"):
        raise ValueError(f"unknown dataset format {format!r}; "
                         f"expected one of {DATASET_FORMATS}")

    examples: list[EvalExample] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}",
                                 path=str(path), line=lineno) from e
            if format == "rose-release":
                record = _adapt_release_record(record, path, lineno)
            example = _parse_record(record, path, lineno)
            try:
                example.validate()
            except ValidationError as e:
                raise ValidationError(f"{path}: line {lineno}: {e}") from e
            if example.example_id in seen_ids:
                raise ValidationError(
                    f"{path}: line {lineno}: duplicate example_id "
                    f"'{example.example_id}'")
            seen_ids.add(example.example_id)
            examples.append(example)
    if not examples:
        raise ParseError("no records", path=str(path))
    return examples


def _require(record: dict, key: str, types, path: Path, lineno: int):
    if key not in record:
        raise ParseError("missing field", path=str(path), line=lineno, field=key)
    value = record[key]
    if not isinstance(value, types):
        raise ParseError(f"expected {types}, got {type(value).__name__}",
                         path=str(path), line=lineno, field=key)
    return value


def _parse_record(record: dict, path: Path, lineno: int) -> EvalExample:
    if not isinstance(record, dict):
        raise ParseError("record is not a JSON object",
                         path=str(path), line=lineno)
    example_id = str(_require(record, "example_id", (str, int), path, lineno))
    source = _require(record, "source", str, path, lineno) if "source" in record else ""
    reference = _require(record, "reference", str, path, lineno)
    candidates = _require(record, "candidates", dict, path, lineno)
    candidates = {str(k): str(v) for k, v in candidates.items()}

    gold_acus = None
    if record.get("gold_acus") is not None:
        texts = _require(record, "gold_acus", list, path, lineno)
        try:
            gold_acus = tuple(
                Acu(acu_id=f"{example_id}#g{i}", text=str(t),
                    origin_example=example_id)
                for i, t in enumerate(texts))
        except ValidationError as e:
            raise ValidationError(f"{path}: line {lineno}: {e}") from e

    gold_labels = None
    if record.get("gold_labels") is not None:
        raw_labels = _require(record, "gold_labels", dict, path, lineno)
        gold_labels = {str(k): tuple(int(x) for x in v)
                       for k, v in raw_labels.items()}

    normalized = None
    if record.get("normalized_score") is not None:
        raw_norm = _require(record, "normalized_score", dict, path, lineno)
        normalized = {str(k): float(v) for k, v in raw_norm.items()}

    return EvalExample(example_id=example_id, source=source,
                       reference=reference, candidates=candidates,
                       gold_acus=gold_acus, gold_labels=gold_labels,
                       normalized_score=normalized)


def _adapt_release_record(record: dict, path: Path, lineno: int) -> dict:
    """Map one public-release record onto the canonical field names."""
    f = _RELEASE_FIELDS
    if not isinstance(record, dict):
        raise ParseError("record is not a JSON object",
                         path=str(path), line=lineno)
    example_id = record.get(f["example_id"], record.get("count_id"))
    if example_id is None:
        raise ParseError("missing field", path=str(path), line=lineno,
                         field=f["example_id"])
    out = {
        "example_id": str(example_id),
        "source": record.get(f["source"], ""),
        "reference": record.get(f["reference"], ""),
        "candidates": record.get(f["candidates"], {}),
        "gold_acus": record.get(f["gold_acus"]),
    }
    annotations = record.get(f["annotations"])
    if isinstance(annotations, dict):
        labels = {}
        normalized = {}
        for system, ann in annotations.items():
            if not isinstance(ann, dict):
                continue
            if f["label_key"] in ann:
                labels[system] = ann[f["label_key"]]
            if f["normalized_key"] in ann:
                normalized[system] = ann[f["normalized_key"]]
        out["gold_labels"] = labels or None
        out["normalized_score"] = normalized or None
    return out


def save_dataset(examples: Iterable[EvalExample], path: str | Path) -> None:
    """Write examples as canonical line-delimited JSON (UTF-8)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for ex in examples:
            record = {
                "example_id": ex.example_id,
                "source": ex.source,
                "reference": ex.reference,
                "candidates": dict(ex.candidates),
                "gold_acus": [a.text for a in ex.gold_acus] if ex.gold_acus is not None else None,
                "gold_labels": ({k: list(v) for k, v in ex.gold_labels.items()}
                                if ex.gold_labels is not None else None),
                "normalized_score": (dict(ex.normalized_score)
                                     if ex.normalized_score is not None else None),
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_score_csv(path: str | Path) -> ScoreMatrix:
    """Parse a ``doc_id,<sys1>,...`` CSV into a :class:`ScoreMatrix`.

    Values are parsed with :func:`float`, so each entry is the IEEE-754
    double nearest the decimal literal in the file.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("no records", path=str(path)) from None
        if not header or header[0] != "doc_id" or len(header) < 2:
            raise ParseError("header must be 'doc_id,<sys1>,<sys2>,...'",
                             path=str(path), line=1)
        system_ids = header[1:]
        doc_ids: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} columns, got {len(row)}",
                    path=str(path), line=lineno)
            doc_ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as e:
                raise ParseError(f"non-numeric score: {e}",
                                 path=str(path), line=lineno) from e
    if not rows:
        raise ParseError("no records", path=str(path))
    try:
        return ScoreMatrix(doc_ids, system_ids, rows)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from e


def save_score_csv(matrix: ScoreMatrix, path: str | Path) -> None:
    """Write a matrix as CSV with ``repr`` floats (lossless round-trip)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["doc_id", *matrix.system_ids])
        for i, doc_id in enumerate(matrix.doc_ids):
            writer.writerow([doc_id, *(repr(float(v)) for v in matrix.values[i])])


def dataset_stats(dataset: Sequence[EvalExample]) -> DatasetSummary:
    """Counts by direct enumeration; ``n_acus`` sums gold ACUs per example."""
    if not dataset:
        raise ValidationError("dataset is empty")
    systems: set[str] = set()
    n_acus = 0
    n_summaries = 0
    for ex in dataset:
        systems.update(ex.candidates.keys())
        n_summaries += len(ex.candidates)
        if ex.gold_acus is not None:
            n_acus += len(ex.gold_acus)
    return DatasetSummary(n_docs=len(dataset), n_systems=len(systems),
                          n_acus=n_acus, n_summaries=n_summaries)
