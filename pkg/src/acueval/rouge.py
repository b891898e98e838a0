"""Lexical-overlap scoring: n-gram ROUGE and LCS-based ROUGE-L.

The functions here are pure and operate on :class:`TokenSequence` inputs, so
callers control tokenization explicitly. ``rouge_avg`` is the convenience
entry point over raw strings (default tokenization, mean F1 of R-1/R-2/R-L).
ROUGE-L is sequence-level LCS over the whole token sequence; there is no
union-LCS or multi-reference handling.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .types import RougeScore
from .tokenizer import TokenSequence, tokenize

__all__ = [
    "NGramMultiset",
    "lcs_length",
    "ngram_multiset",
    "rouge_avg",
    "rouge_l",
    "rouge_n",
]


@dataclass(frozen=True)
class NGramMultiset:
    """N-grams of one token sequence with their occurrence counts."""

    order: int
    counts: Mapping[tuple[str, ...], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def ngram_multiset(sequence: TokenSequence, order: int) -> NGramMultiset:
    if order < 1:
        raise ValueError(f"n-gram order must be >= 1, got {order}")
    toks = sequence.tokens
    grams = Counter(toks[i:i + order] for i in range(len(toks) - order + 1))
    return NGramMultiset(order=order, counts=dict(grams))


def rouge_n(candidate: TokenSequence, reference: TokenSequence,
            order: int) -> RougeScore:
    """Clipped n-gram overlap: recall over the reference, precision over the
    candidate. A side with zero n-grams contributes 0 to its component."""
    cand = ngram_multiset(candidate, order)
    ref = ngram_multiset(reference, order)
    overlap = 0
    for gram, count in cand.counts.items():
        overlap += min(count, ref.counts.get(gram, 0))
    precision = overlap / cand.total if cand.total else 0.0
    recall = overlap / ref.total if ref.total else 0.0
    return RougeScore.from_precision_recall(precision, recall)


def lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Longest common subsequence length via a rolling two-row table."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(candidate: TokenSequence, reference: TokenSequence) -> RougeScore:
    """LCS overlap: recall = LCS/|reference|, precision = LCS/|candidate|."""
    lcs = lcs_length(candidate.tokens, reference.tokens)
    precision = lcs / len(candidate) if len(candidate) else 0.0
    recall = lcs / len(reference) if len(reference) else 0.0
    return RougeScore.from_precision_recall(precision, recall)


def rouge_avg(candidate: str, reference: str) -> float:
    """Mean F1 of ROUGE-1, ROUGE-2, and ROUGE-L under default tokenization."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    scores = (rouge_n(cand, ref, 1), rouge_n(cand, ref, 2), rouge_l(cand, ref))
    return sum(s.f1 for s in scores) / 3.0
