"""Meta-evaluation statistics for automatic metrics.

Given a human score matrix H and a metric score matrix M (documents by
systems), the summary-level correlation is the mean of per-document
correlations between corresponding rows, and the system-level correlation is
a single coefficient over the per-system mean scores. Rows where either side
is constant are skipped and counted, never imputed. A paired document-level
bootstrap decides whether one metric correlates significantly better than
another. Also here: the segment-level preference-concordance statistic used
for relative-ranking benchmarks, greedy-matching quality analysis between two
content-unit sets, and the candidate-pair similarity distribution.

All operations are pure; determinism of the bootstrap is fixed by its seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AlignmentError, DegenerateInputError, ValidationError
from .rouge import rouge_l, rouge_n
from .tokenizer import TokenSequence, tokenize
from .types import AcuSet, EvalExample, RougeScore, ScoreMatrix, harmonic_mean

__all__ = [
    "COEFFICIENTS",
    "CorrelationReport",
    "PreferencePair",
    "SimilarityDistribution",
    "acu_quality",
    "candidate_similarity",
    "correlate",
    "segment_level",
    "significance",
    "summary_level",
    "system_level",
    "tau_like",
    "write_histogram_csv",
    "write_reports_csv",
    "write_reports_json",
]

COEFFICIENTS = ("pearson", "spearman", "kendall_b")


@dataclass(frozen=True)
class CorrelationReport:
    """One correlation measurement plus how many rows actually fed it."""

    level: str
    coefficient: str
    value: float
    rows_used: int
    rows_skipped_constant: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "coefficient": self.coefficient,
            "value": self.value,
            "rows_used": self.rows_used,
            "rows_skipped_constant": self.rows_skipped_constant,
        }


@dataclass(frozen=True)
class PreferencePair:
    """A human relative ranking of two system outputs for one document.

    ``metric_scores`` holds the metric's scores as (better side, worse side).
    """

    doc_id: str
    better: str
    worse: str
    metric_scores: tuple[float, float]

    def __post_init__(self):
        if self.better == self.worse:
            raise ValidationError(
                f"preference pair for doc '{self.doc_id}' ranks a system "
                f"against itself")


# ---------------------------------------------------------------------------
# Correlation coefficients
# ---------------------------------------------------------------------------


def _is_constant(v: np.ndarray) -> bool:
    return bool(np.all(v == v[0]))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xm = x - x.mean()
    ym = y - y.mean()
    return float(np.dot(xm, ym) / np.sqrt(np.dot(xm, xm) * np.dot(ym, ym)))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """Fractional ranks (1-based); tied values share their average rank."""
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x), dtype=np.float64)
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _kendall_tau_b(x: np.ndarray, y: np.ndarray) -> float:
    n = len(x)
    total_pairs = n * (n - 1) // 2
    concordant_minus_discordant = 0.0
    tied_x = 0
    tied_y = 0
    # Row-chunked pairwise comparison keeps memory bounded for long vectors.
    chunk = max(1, 4_000_000 // max(n, 1))
    cols = np.arange(n)
    for start in range(0, n, chunk):
        end = min(start + chunk, n)
        upper = cols[None, :] > np.arange(start, end)[:, None]
        sx = np.sign(x[start:end, None] - x[None, :])
        sy = np.sign(y[start:end, None] - y[None, :])
        concordant_minus_discordant += float(np.sum(sx * sy, where=upper))
        tied_x += int(np.count_nonzero((sx == 0) & upper))
        tied_y += int(np.count_nonzero((sy == 0) & upper))
    denom = np.sqrt(float(total_pairs - tied_x) * float(total_pairs - tied_y))
    if denom == 0.0:
        raise DegenerateInputError("all pairs tied; tau-b undefined")
    return concordant_minus_discordant / denom


def correlate(x, y, coefficient: str = "pearson") -> float:
    """Correlation coefficient between two equal-length vectors.

    Pearson uses the moment formula, Spearman is Pearson on fractional ranks
    (ties get average ranks), and ``kendall_b`` is the tie-corrected tau.
    Zero variance on either side raises :class:`DegenerateInputError` rather
    than returning NaN.
    """
    if coefficient not in COEFFICIENTS:
        raise ValueError(f"unknown coefficient {coefficient!r}; "
                         f"expected one of {COEFFICIENTS}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise ValueError("inputs must be 1-d vectors of equal length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    if _is_constant(x) or _is_constant(y):
        raise DegenerateInputError("zero variance input vector")
    if coefficient == "pearson":
        value = _pearson(x, y)
    elif coefficient == "spearman":
        value = _pearson(_average_ranks(x), _average_ranks(y))
    else:
        value = _kendall_tau_b(x, y)
    return float(min(1.0, max(-1.0, value)))


# ---------------------------------------------------------------------------
# Matrix-level correlations
# ---------------------------------------------------------------------------


def _aligned(matrix: ScoreMatrix, template: ScoreMatrix) -> ScoreMatrix:
    if (matrix.doc_ids == template.doc_ids
            and matrix.system_ids == template.system_ids):
        return matrix
    if set(matrix.doc_ids) != set(template.doc_ids):
        raise AlignmentError("matrices do not share the same doc_ids")
    if set(matrix.system_ids) != set(template.system_ids):
        raise AlignmentError("matrices do not share the same system_ids")
    return matrix.reindexed(template.doc_ids, template.system_ids)


def _row_coefficients(H: ScoreMatrix, M: ScoreMatrix,
                      coefficient: str) -> np.ndarray:
    """Per-document coefficients; NaN marks rows skipped as constant."""
    out = np.full(H.n_docs, np.nan)
    for i in range(H.n_docs):
        h, m = H.values[i], M.values[i]
        if _is_constant(h) or _is_constant(m):
            continue
        try:
            out[i] = correlate(h, m, coefficient)
        except DegenerateInputError:
            continue
    return out


def summary_level(H: ScoreMatrix, M: ScoreMatrix,
                  coefficient: str = "kendall_b") -> CorrelationReport:
    """Mean of per-document row correlations between H and M.

    Rows where either side is constant are skipped and reported in
    ``rows_skipped_constant``; skipping is auditable, imputation would
    silently bias the average.
    """
    M = _aligned(M, H)
    if H.n_systems < 2:
        raise DegenerateInputError("need at least two systems per row")
    rows = _row_coefficients(H, M, coefficient)
    used = np.isfinite(rows)
    if not used.any():
        raise DegenerateInputError("every row was constant; nothing to average")
    value = float(rows[used].mean())
    return CorrelationReport(level="summary", coefficient=coefficient,
                             value=value, rows_used=int(used.sum()),
                             rows_skipped_constant=int((~used).sum()))


def system_level(H: ScoreMatrix, M: ScoreMatrix,
                 coefficient: str = "kendall_b") -> CorrelationReport:
    """One coefficient over the per-system mean scores of H and M."""
    M = _aligned(M, H)
    if H.n_systems < 2:
        raise DegenerateInputError("need at least two systems")
    value = correlate(H.values.mean(axis=0), M.values.mean(axis=0), coefficient)
    return CorrelationReport(level="system", coefficient=coefficient,
                             value=value, rows_used=H.n_docs,
                             rows_skipped_constant=0)


def segment_level(human, metric,
                  coefficient: str = "spearman") -> CorrelationReport:
    """One coefficient over flat per-segment score vectors.

    For benchmarks that score individual text pairs rather than
    document-by-system matrices (semantic-similarity style evaluations)."""
    human = np.asarray(human, dtype=np.float64)
    value = correlate(human, metric, coefficient)
    return CorrelationReport(level="segment", coefficient=coefficient,
                             value=value, rows_used=len(human),
                             rows_skipped_constant=0)


def tau_like(pairs: Sequence[PreferencePair]) -> float:
    """Preference concordance: (concordant - discordant) / all pairs.

    A pair is concordant only when the metric scores the human-preferred
    output strictly higher; metric ties count as discordant.
    """
    if not pairs:
        raise ValueError("need at least one preference pair")
    concordant = sum(1 for p in pairs if p.metric_scores[0] > p.metric_scores[1])
    discordant = len(pairs) - concordant
    return (concordant - discordant) / len(pairs)


def significance(H: ScoreMatrix, M_a: ScoreMatrix, M_b: ScoreMatrix,
                 level: str = "summary", coefficient: str = "kendall_b",
                 resamples: int = 1000, seed: int = 0) -> float:
    """Paired bootstrap p-value for "M_a correlates better than M_b".

    Documents are resampled with replacement; both correlations are
    recomputed on each resample, and p is the fraction of resamples where
    M_a does **not** strictly beat M_b (ties and degenerate resamples count
    against M_a). Deterministic for a fixed seed.
    """
    if level not in ("summary", "system"):
        raise ValueError(f"unknown level {level!r}")
    if resamples < 100:
        raise ValueError("resamples must be >= 100")
    M_a = _aligned(M_a, H)
    M_b = _aligned(M_b, H)
    n = H.n_docs
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(resamples, n))

    if level == "summary":
        ra = _row_coefficients(H, M_a, coefficient)
        rb = _row_coefficients(H, M_b, coefficient)
        beats = 0
        for r in range(resamples):
            sel_a = ra[idx[r]]
            sel_b = rb[idx[r]]
            sel_a = sel_a[np.isfinite(sel_a)]
            sel_b = sel_b[np.isfinite(sel_b)]
            if len(sel_a) == 0 or len(sel_b) == 0:
                continue
            if sel_a.mean() > sel_b.mean():
                beats += 1
    else:
        beats = 0
        for r in range(resamples):
            rows = idx[r]
            h_means = H.values[rows].mean(axis=0)
            try:
                va = correlate(h_means, M_a.values[rows].mean(axis=0), coefficient)
                vb = correlate(h_means, M_b.values[rows].mean(axis=0), coefficient)
            except DegenerateInputError:
                continue
            if va > vb:
                beats += 1
    return 1.0 - beats / resamples


# ---------------------------------------------------------------------------
# Content-unit quality and candidate similarity
# ---------------------------------------------------------------------------

_MATCHERS: dict[str, Callable[[TokenSequence, TokenSequence], float]] = {
    "rouge1": lambda a, b: rouge_n(a, b, 1).f1,
    "rouge2": lambda a, b: rouge_n(a, b, 2).f1,
    "rougeL": lambda a, b: rouge_l(a, b).f1,
}


def acu_quality(generated: AcuSet, reference: AcuSet,
                matcher: str = "rouge1") -> RougeScore:
    """Greedy-matching similarity between generated and reference unit sets.

    Each unit is independently matched to its best-scoring unit on the other
    side (no one-to-one constraint). Following the convention of the
    protocol this implements, "recall" averages best matches over the
    *generated* units and "precision" over the *reference* units, even
    though the recall denominator is the generated-set size; F1 is their
    harmonic mean.
    """
    if matcher not in _MATCHERS:
        raise ValueError(f"unknown matcher {matcher!r}; "
                         f"expected one of {sorted(_MATCHERS)}")
    if len(generated) == 0 or len(reference) == 0:
        raise ValueError("both unit sets must be non-empty")
    score = _MATCHERS[matcher]
    gen_tokens = [tokenize(a.text) for a in generated]
    ref_tokens = [tokenize(a.text) for a in reference]
    pair = np.array([[score(r, g) for r in ref_tokens] for g in gen_tokens])
    recall = float(pair.max(axis=1).mean())
    precision = float(pair.max(axis=0).mean())
    return RougeScore(precision=precision, recall=recall,
                      f1=harmonic_mean(precision, recall))


@dataclass(frozen=True)
class SimilarityDistribution:
    """Pooled pairwise candidate similarities plus summary statistics."""

    values: np.ndarray
    mean: float
    q1: float
    median: float
    q3: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "SimilarityDistribution":
        arr = np.asarray(values, dtype=np.float64)
        q1, median, q3 = np.percentile(arr, [25, 50, 75])
        arr.setflags(write=False)
        return cls(values=arr, mean=float(arr.mean()), q1=float(q1),
                   median=float(median), q3=float(q3))


def candidate_similarity(dataset: Sequence[EvalExample]) -> SimilarityDistribution:
    """Unigram-overlap F1 over all unordered candidate pairs, per example,
    pooled across the dataset. Every example must have at least two
    candidates."""
    values: list[float] = []
    for ex in dataset:
        systems = list(ex.candidates)
        if len(systems) < 2:
            raise ValidationError(
                f"example '{ex.example_id}' has fewer than two candidates")
        toks = {s: tokenize(ex.candidates[s]) for s in systems}
        for i in range(len(systems)):
            for j in range(i + 1, len(systems)):
                values.append(rouge_n(toks[systems[i]], toks[systems[j]], 1).f1)
    if not values:
        raise ValidationError("dataset is empty")
    return SimilarityDistribution.from_values(values)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def write_reports_csv(reports: Iterable[CorrelationReport],
                      path: str | Path) -> None:
    rows = [r.to_dict() for r in reports]
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(
            f, fieldnames=["level", "coefficient", "value", "rows_used",
                           "rows_skipped_constant"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_reports_json(reports: Iterable[CorrelationReport],
                       path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        json.dump([r.to_dict() for r in reports], f, indent=2)
        f.write("\n")


def write_histogram_csv(dist: SimilarityDistribution, path: str | Path,
                        bins: int = 20) -> None:
    """Emit (bin, count) rows over [0, 1] for external plotting."""
    counts, edges = np.histogram(dist.values, bins=bins, range=(0.0, 1.0))
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["bin", "count"])
        for left, count in zip(edges[:-1], counts):
            writer.writerow([f"{left:.6f}", int(count)])
