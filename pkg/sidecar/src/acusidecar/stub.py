"""Deterministic rule-based backends for integration testing.

Stub mode keeps the whole wire surface servable without any model artifact:
extraction splits on sentence punctuation, entailment is token-set recall of
the hypothesis inside the premise at a 0.8 threshold, scoring replays the
two rules end to end, and generation emits sentence prefixes. Every function
is a pure mapping from inputs to outputs.
"""

from __future__ import annotations

import re

STUB_THRESHOLD = 0.8

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SENTENCE_RE = re.compile(r"(?<=[.!?;])\s+|\n+")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.casefold()))


def stub_extract(text: str) -> list[str]:
    parts = [p.strip() for p in _SENTENCE_RE.split(text)]
    parts = [p for p in parts if p]
    return parts if parts else [text.strip()]


def stub_entail(premise: str, hypothesis: str,
                context: str | None = None) -> tuple[int, float]:
    """Fraction of hypothesis tokens present in the premise; context unused
    by the rule but accepted so the contextual wire shape round-trips."""
    hyp = _tokens(hypothesis)
    if not hyp:
        return 0, 0.0
    probability = len(hyp & _tokens(premise)) / len(hyp)
    return int(probability >= STUB_THRESHOLD), probability


def stub_recall(candidate: str, reference: str) -> float:
    """Unit recall of the candidate w.r.t. the reference under stub rules."""
    units = stub_extract(reference)
    if not units:
        return 0.0
    labels = [stub_entail(candidate, unit)[0] for unit in units]
    return sum(labels) / len(labels)


def stub_score(candidate: str, reference: str, direction: str = "recall") -> float:
    forward = stub_recall(candidate, reference)
    if direction == "recall":
        return forward
    backward = stub_recall(reference, candidate)
    if forward + backward == 0:
        return 0.0
    return 2.0 * forward * backward / (forward + backward)


def stub_generate(source: str, num_candidates: int) -> list[str]:
    """Deterministic candidates: growing sentence prefixes of the source."""
    sentences = stub_extract(source)
    candidates = []
    for i in range(num_candidates):
        take = (i % len(sentences)) + 1
        prefix = " ".join(sentences[:take])
        if i >= len(sentences):
            # later rounds shorten the last sentence to keep candidates distinct
            words = prefix.split()
            keep = max(1, len(words) - (i // len(sentences)))
            prefix = " ".join(words[:keep])
        candidates.append(prefix)
    return candidates
