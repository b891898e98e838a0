"""Pluggable extraction and checking backends.

Extractors turn one text sequence into a delimiter-joined sequence of content
units; checkers decide whether a unit's information is conveyed by a target
text. Both come in three flavors: rule-based local fallbacks, cached fixtures
that replay stored gold labels, and remote HTTP clients talking to a model
service. Backends declare ``concurrent_safe``; remote backends keep it False
so corpus scoring serializes their calls.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from typing import Mapping, Sequence

import requests

from .errors import BackendError
from .tokenizer import content_tokens
from .types import Acu, EntailmentJudgment, EvalExample

__all__ = [
    "ACU_DELIMITER",
    "CheckerBackend",
    "ExtractorBackend",
    "FixtureExtractor",
    "SentenceExtractor",
    "GoldAcuExtractor",
    "LexicalChecker",
    "CachedChecker",
    "RemoteExtractor",
    "RemoteChecker",
    "RemoteScorer",
]

# Sentinel separating generated units inside one extractor output sequence.
ACU_DELIMITER = "<SEP>"

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?;])\s+|\n+")


class ExtractorBackend(ABC):
    """Generates one unit sequence from a text; units joined by the sentinel."""

    name: str = "extractor"
    concurrent_safe: bool = True

    @abstractmethod
    def generate(self, text: str) -> str:
        """Return the raw generated sequence for ``text``."""

    def extract(self, text: str, origin: str = "") -> list[Acu]:
        from .pipeline import extract_acus
        return extract_acus(text, self, origin=origin)


class CheckerBackend(ABC):
    """Judges whether a unit's information is conveyed by a target text.

    ``mode`` is ``standard`` (target and unit only) or ``contextual`` (the
    unit's source text is part of the input). ``label == 1`` exactly when
    ``probability >= threshold``.
    """

    name: str = "checker"
    mode: str = "standard"
    threshold: float = 0.5
    concurrent_safe: bool = True

    @abstractmethod
    def check(self, target: str, acu: Acu,
              source: str | None = None) -> EntailmentJudgment:
        ...

    def check_batch(self, target: str, acus: Sequence[Acu],
                    source: str | None = None) -> list[EntailmentJudgment]:
        """Judge several units against one target; order preserved.

        Local backends just loop; remote backends override this with one
        batched request instead of accepting concurrent calls.
        """
        return [self.check(target, acu, source) for acu in acus]


class FixtureExtractor(ExtractorBackend):
    """Replays canned generation outputs keyed on the exact input text."""

    def __init__(self, outputs: Mapping[str, str | Sequence[str]],
                 name: str = "fixture-extractor"):
        self.name = name
        self._outputs: dict[str, str] = {}
        for text, out in outputs.items():
            if not isinstance(out, str):
                out = ACU_DELIMITER.join(out)
            self._outputs[text] = out

    def generate(self, text: str) -> str:
        try:
            return self._outputs[text]
        except KeyError:
            raise BackendError(self.name,
                               f"no fixture output for text {text[:60]!r}...")


class SentenceExtractor(ExtractorBackend):
    """Rule-based fallback: each sentence-like span becomes one unit.

    Splits on sentence punctuation and newlines. This is a degraded-mode
    extractor for model-free runs, not a claim of unit quality.
    """

    name = "sentence-extractor"

    def generate(self, text: str) -> str:
        parts = [p.strip() for p in _SENTENCE_SPLIT_RE.split(text)]
        parts = [p for p in parts if p]
        if not parts:
            parts = [text.strip()]
        return ACU_DELIMITER.join(parts)


class GoldAcuExtractor(ExtractorBackend):
    """Replays a dataset's gold content units, keyed on the reference text."""

    def __init__(self, dataset: Sequence[EvalExample],
                 name: str = "gold-extractor"):
        self.name = name
        self._by_reference: dict[str, str] = {}
        for ex in dataset:
            if ex.gold_acus:
                self._by_reference[ex.reference] = ACU_DELIMITER.join(
                    a.text for a in ex.gold_acus)

    def generate(self, text: str) -> str:
        try:
            return self._by_reference[text]
        except KeyError:
            raise BackendError(
                self.name, "text is not a dataset reference with gold ACUs")


class LexicalChecker(CheckerBackend):
    """Model-free fallback: stemmed, stopword-filtered token recall.

    The probability is the fraction of the unit's distinct content tokens
    (stemmed) that appear among the target's stemmed content tokens; the
    label fires at ``threshold`` (default 0.8). A testing/degraded-mode
    backend: deterministic, but no fidelity claim against a trained model.
    Standard mode only.
    """

    name = "lexical-checker"
    mode = "standard"

    def __init__(self, threshold: float = 0.8):
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        self.threshold = threshold

    def check(self, target: str, acu: Acu,
              source: str | None = None) -> EntailmentJudgment:
        acu_tokens = set(content_tokens(acu.text, stem=True))
        target_tokens = set(content_tokens(target, stem=True))
        recall = len(acu_tokens & target_tokens) / len(acu_tokens)
        label = 1 if recall >= self.threshold else 0
        return EntailmentJudgment(label=label, probability=recall,
                                  contextual=False)


class CachedChecker(CheckerBackend):
    """Replays a dataset's stored gold labels.

    Judgments are keyed on (origin example, unit index, target text): the
    target text identifies the system whose candidate it is, and the unit's
    position among the example's gold ACUs selects the stored label. Two
    systems with byte-identical candidates share the first system's labels,
    since a deterministic checker cannot tell them apart.
    """

    name = "cached-checker"
    mode = "standard"
    threshold = 0.5

    def __init__(self, dataset: Sequence[EvalExample]):
        self._labels: dict[tuple[str, str, int], int] = {}
        self._system_by_target: dict[tuple[str, str], str] = {}
        self._acu_index: dict[tuple[str, str], int] = {}
        for ex in dataset:
            if not ex.gold_acus or not ex.gold_labels:
                continue
            for i, acu in enumerate(ex.gold_acus):
                self._acu_index.setdefault((ex.example_id, acu.text), i)
            for system, labels in ex.gold_labels.items():
                key = (ex.example_id, ex.candidates[system].strip())
                self._system_by_target.setdefault(key, system)
                for i, label in enumerate(labels):
                    self._labels[(ex.example_id, system, i)] = int(label)

    def check(self, target: str, acu: Acu,
              source: str | None = None) -> EntailmentJudgment:
        example = acu.origin_example
        system = self._system_by_target.get((example, target.strip()))
        if system is None:
            raise BackendError(self.name,
                               f"no cached judgments for example '{example}' "
                               f"and the given target text")
        index = self._acu_index.get((example, acu.text))
        if index is None:
            raise BackendError(self.name,
                               f"unit {acu.text[:60]!r} is not a gold ACU of "
                               f"example '{example}'")
        label = self._labels[(example, system, index)]
        return EntailmentJudgment(label=label, probability=float(label),
                                  contextual=False)


# ---------------------------------------------------------------------------
# Remote HTTP backends (model service clients)
# ---------------------------------------------------------------------------


def _post_json(endpoint: str, route: str, payload: dict, backend: str,
               timeout: float) -> dict:
    url = endpoint.rstrip("/") + route
    try:
        response = requests.post(url, json=payload, timeout=timeout)
    except requests.RequestException as e:
        raise BackendError(backend, f"request to {url} failed: {e}") from e
    if response.status_code != 200:
        raise BackendError(backend,
                           f"{url} returned HTTP {response.status_code}: "
                           f"{response.text[:200]}")
    try:
        return response.json()
    except ValueError as e:
        raise BackendError(backend, f"{url} returned non-JSON body") from e


class RemoteExtractor(ExtractorBackend):
    """Client for a unit-extraction service (``POST /v1/extract``)."""

    concurrent_safe = False

    def __init__(self, endpoint: str, name: str = "remote-extractor",
                 timeout: float = 60.0):
        self.endpoint = endpoint
        self.name = name
        self.timeout = timeout

    def generate(self, text: str) -> str:
        body = _post_json(self.endpoint, "/v1/extract", {"texts": [text]},
                          self.name, self.timeout)
        try:
            units = body["acus"][0]
        except (KeyError, IndexError, TypeError):
            raise BackendError(self.name,
                               "malformed extract response; expected "
                               "{'acus': [[...]]}") from None
        return ACU_DELIMITER.join(str(u) for u in units)


class RemoteChecker(CheckerBackend):
    """Client for an entailment service (``POST /v1/entail``).

    The label is re-derived client-side as ``probability >= threshold`` so
    the judgment invariant holds regardless of the server's own decision
    rule; the default threshold matches the stub service (0.8).
    """

    concurrent_safe = False

    def __init__(self, endpoint: str, mode: str = "standard",
                 threshold: float = 0.8, name: str = "remote-checker",
                 timeout: float = 60.0):
        if mode not in ("standard", "contextual"):
            raise ValueError(f"unknown checker mode {mode!r}")
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        self.endpoint = endpoint
        self.mode = mode
        self.threshold = threshold
        self.name = name
        self.timeout = timeout

    def check(self, target: str, acu: Acu,
              source: str | None = None) -> EntailmentJudgment:
        payload = {"premise": target, "hypothesis": acu.text}
        contextual = self.mode == "contextual"
        if contextual:
            payload["context"] = source
        body = _post_json(self.endpoint, "/v1/entail", payload,
                          self.name, self.timeout)
        return self._judgment_from(body, contextual)

    def check_batch(self, target: str, acus: Sequence[Acu],
                    source: str | None = None) -> list[EntailmentJudgment]:
        contextual = self.mode == "contextual"
        items = []
        for acu in acus:
            item = {"premise": target, "hypothesis": acu.text}
            if contextual:
                item["context"] = source
            items.append(item)
        body = _post_json(self.endpoint, "/v1/entail", {"items": items},
                          self.name, self.timeout)
        results = body.get("results")
        if not isinstance(results, list) or len(results) != len(acus):
            raise BackendError(self.name,
                               "malformed batch entail response; expected "
                               f"{len(acus)} ordered results")
        return [self._judgment_from(r, contextual) for r in results]

    def _judgment_from(self, body, contextual: bool) -> EntailmentJudgment:
        try:
            probability = float(body["probability"])
        except (KeyError, TypeError, ValueError):
            raise BackendError(self.name,
                               "malformed entail response; expected "
                               "{'label': ..., 'probability': ...}") from None
        label = 1 if probability >= self.threshold else 0
        return EntailmentJudgment(label=label, probability=probability,
                                  contextual=contextual)


class RemoteScorer:
    """Client for a one-stage scoring service (``POST /v1/score``)."""

    concurrent_safe = False

    def __init__(self, endpoint: str, name: str = "remote-scorer",
                 timeout: float = 60.0):
        self.endpoint = endpoint
        self.name = name
        self.timeout = timeout

    def score(self, candidate: str, reference: str,
              direction: str = "recall") -> float:
        body = _post_json(self.endpoint, "/v1/score",
                          {"candidate": candidate, "reference": reference,
                           "direction": direction},
                          self.name, self.timeout)
        try:
            value = float(body["score"])
        except (KeyError, TypeError, ValueError):
            raise BackendError(self.name,
                               "malformed score response; expected "
                               "{'score': ...}") from None
        if not 0.0 <= value <= 1.0:
            raise BackendError(self.name, f"score {value} outside [0, 1]")
        return value
