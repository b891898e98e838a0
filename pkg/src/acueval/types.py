"""Domain types shared by every stage of the toolkit.

The dataclasses here are frozen; once constructed (and validated) they are
safe for concurrent read access.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .tokenizer import content_tokens

__all__ = [
    "Acu",
    "AcuSet",
    "DatasetSummary",
    "EntailmentJudgment",
    "EvalExample",
    "RougeScore",
    "ScoreMatrix",
    "harmonic_mean",
]


def harmonic_mean(a: float, b: float) -> float:
    """``2ab / (a + b)``, defined as 0 when both inputs are 0."""
    if a + b == 0:
        return 0.0
    return 2.0 * a * b / (a + b)


@dataclass(frozen=True)
class Acu:
    """One atomic content unit: a minimal, self-contained fact from a text."""

    acu_id: str
    text: str
    origin_example: str = ""

    def __post_init__(self):
        if not content_tokens(self.text):
            raise ValidationError(
                f"ACU '{self.acu_id}' has no content token: {self.text!r}")


@dataclass(frozen=True)
class AcuSet:
    """An ordered collection of content units extracted from one text."""

    acus: tuple[Acu, ...]
    origin: str = ""

    @classmethod
    def from_texts(cls, texts: Sequence[str], origin: str = "") -> "AcuSet":
        prefix = f"{origin}#" if origin else ""
        return cls(
            acus=tuple(
                Acu(acu_id=f"{prefix}a{i}", text=t, origin_example=origin)
                for i, t in enumerate(texts)),
            origin=origin,
        )

    def texts(self) -> list[str]:
        return [a.text for a in self.acus]

    def __len__(self) -> int:
        return len(self.acus)

    def __iter__(self) -> Iterator[Acu]:
        return iter(self.acus)


@dataclass(frozen=True)
class EntailmentJudgment:
    """Binary entailment decision plus the probability behind it.

    ``contextual`` records whether the producing checker also saw the unit's
    source text. The producing backend guarantees ``label == 1`` exactly when
    ``probability`` reached its decision threshold; the threshold itself is
    recorded in run metadata, not here.
    """

    label: int
    probability: float
    contextual: bool = False

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValidationError(f"judgment label must be 0 or 1, got {self.label}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValidationError(
                f"judgment probability must be in [0, 1], got {self.probability}")


@dataclass(frozen=True)
class RougeScore:
    """Precision/recall/F1 triple for one lexical-overlap comparison."""

    precision: float
    recall: float
    f1: float

    @classmethod
    def from_precision_recall(cls, precision: float, recall: float) -> "RougeScore":
        return cls(precision=precision, recall=recall,
                   f1=harmonic_mean(precision, recall))


@dataclass(frozen=True)
class EvalExample:
    """One source document, its reference summary, and per-system candidates.

    ``gold_acus`` and ``gold_labels`` carry human annotations when the dataset
    provides them: one label list per system, aligned index-by-index with
    ``gold_acus``.
    """

    example_id: str
    source: str
    reference: str
    candidates: Mapping[str, str]
    gold_acus: tuple[Acu, ...] | None = None
    gold_labels: Mapping[str, tuple[int, ...]] | None = None
    normalized_score: Mapping[str, float] | None = None

    def validate(self) -> None:
        if not self.example_id:
            raise ValidationError("example_id must be non-empty")
        if not self.reference.strip():
            raise ValidationError(
                f"example '{self.example_id}': reference is empty")
        if not self.candidates:
            raise ValidationError(
                f"example '{self.example_id}': no candidate summaries")
        for system, text in self.candidates.items():
            if not text.strip():
                raise ValidationError(
                    f"example '{self.example_id}': candidate for system "
                    f"'{system}' is empty")
        if self.gold_labels is not None:
            n_acus = len(self.gold_acus or ())
            for system, labels in self.gold_labels.items():
                if system not in self.candidates:
                    raise ValidationError(
                        f"example '{self.example_id}': gold labels for unknown "
                        f"system '{system}'")
                if len(labels) != n_acus:
                    raise ValidationError(
                        f"example '{self.example_id}': system '{system}' has "
                        f"{len(labels)} gold labels but {n_acus} gold ACUs")
                if any(l not in (0, 1) for l in labels):
                    raise ValidationError(
                        f"example '{self.example_id}': system '{system}' has "
                        f"non-binary gold labels")


@dataclass(frozen=True)
class DatasetSummary:
    """Benchmark-level counts: documents, systems, ACUs, scored summaries."""

    n_docs: int
    n_systems: int
    n_acus: int
    n_summaries: int


class ScoreMatrix:
    """An n-documents by m-systems matrix of finite scores.

    Values are stored as an immutable float64 array. Row/column lookups go
    through the id lists, so two matrices can be aligned by id regardless of
    their physical ordering.
    """

    def __init__(self, doc_ids: Sequence[str], system_ids: Sequence[str],
                 values) -> None:
        self.doc_ids: tuple[str, ...] = tuple(doc_ids)
        self.system_ids: tuple[str, ...] = tuple(system_ids)
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError("score matrix values must be 2-dimensional")
        if arr.shape != (len(self.doc_ids), len(self.system_ids)):
            raise ValidationError(
                f"score matrix shape {arr.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.system_ids)} systems")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValidationError("duplicate doc_ids in score matrix")
        if len(set(self.system_ids)) != len(self.system_ids):
            raise ValidationError("duplicate system_ids in score matrix")
        if len(self.doc_ids) < 1:
            raise ValidationError("score matrix needs at least one document row")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("score matrix contains NaN or infinite entries")
        arr.setflags(write=False)
        self.values: np.ndarray = arr

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_systems(self) -> int:
        return len(self.system_ids)

    def row(self, doc_id: str) -> np.ndarray:
        return self.values[self.doc_ids.index(doc_id)]

    def reindexed(self, doc_ids: Sequence[str],
                  system_ids: Sequence[str]) -> "ScoreMatrix":
        """A copy with rows/columns permuted into the given id order."""
        ri = [self.doc_ids.index(d) for d in doc_ids]
        ci = [self.system_ids.index(s) for s in system_ids]
        return ScoreMatrix(doc_ids, system_ids, self.values[np.ix_(ri, ci)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, ScoreMatrix)
                and self.doc_ids == other.doc_ids
                and self.system_ids == other.system_ids
                and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return (f"ScoreMatrix({self.n_docs} docs x {self.n_systems} systems)")
