"""Trainable entailment checker for content units.

Binary classification over (target text, unit) pairs with an optional
contextual template that prepends the unit's source text. Same miniature
encoder family as the one-stage scorer, trained with binary cross-entropy
on gold unit labels.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from .encoding import checker_template, encode_tokens

logger = logging.getLogger(__name__)

__all__ = [
    "CheckerConfig",
    "CheckerModel",
    "CheckerTrainingResult",
    "fine_tune_checker",
    "load_checker",
    "save_checker",
]


@dataclass
class CheckerConfig:
    template: str = "standard"  # or "contextual"
    threshold: float = 0.5
    vocab_size: int = 4096
    embedding_dim: int = 64
    hidden_dim: int = 64
    epochs: int = 150
    lr: float = 0.05
    batch_size: int = 16
    val_fraction: float = 0.2
    patience: int = 25
    seed: int = 0


class _PairClassifier(nn.Module):
    def __init__(self, config: CheckerConfig):
        super().__init__()
        self.embedding = nn.EmbeddingBag(config.vocab_size,
                                         config.embedding_dim, mode="mean")
        self.hidden = nn.Linear(config.embedding_dim, config.hidden_dim)
        self.activation = nn.ReLU()
        self.head = nn.Linear(config.hidden_dim, 1)

    def forward(self, flat: torch.Tensor, offsets: torch.Tensor) -> torch.Tensor:
        pooled = self.embedding(flat, offsets)
        hidden = self.activation(self.hidden(pooled))
        return torch.sigmoid(self.head(hidden)).squeeze(-1)


def _encode_batch(token_lists: Sequence[list[int]]):
    flat = torch.tensor([t for toks in token_lists for t in toks],
                        dtype=torch.long)
    offsets = torch.tensor(
        np.cumsum([0] + [len(t) for t in token_lists[:-1]]),
        dtype=torch.long)
    return flat, offsets


class CheckerModel:
    def __init__(self, net: _PairClassifier, config: CheckerConfig):
        self.net = net.eval()
        self.config = config

    def _encode(self, premise: str, hypothesis: str, context: str | None):
        if self.config.template == "contextual" and context is None:
            raise ValueError("contextual checker needs the unit's source text")
        ctx = context if self.config.template == "contextual" else None
        return encode_tokens(checker_template(premise, hypothesis, ctx),
                             self.config.vocab_size)

    @torch.no_grad()
    def predict(self, premise: str, hypothesis: str,
                context: str | None = None) -> tuple[int, float]:
        flat, offsets = _encode_batch([self._encode(premise, hypothesis, context)])
        probability = float(self.net(flat, offsets)[0])
        probability = min(1.0, max(0.0, probability))
        return int(probability >= self.config.threshold), probability


@dataclass
class CheckerTrainingResult:
    model: CheckerModel
    config: CheckerConfig
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_val_accuracy: float = 0.0
    stopped_early: bool = False


def fine_tune_checker(examples: Sequence[dict],
                      config: CheckerConfig | None = None) -> CheckerTrainingResult:
    """Fit the classifier on gold unit labels.

    ``examples`` are dicts with ``premise`` (the target text), ``hypothesis``
    (the unit text), optional ``context`` (the unit's source text, required
    by the contextual template), and a binary ``label``.

    Failure modes mirror the one-stage trainer: an empty set raises
    ``ValueError``; a validation-accuracy plateau beyond ``patience`` stops
    training early with the best weights restored.
    """
    config = config or CheckerConfig()
    examples = list(examples)
    if not examples:
        raise ValueError("empty training set")
    if config.template not in ("standard", "contextual"):
        raise ValueError(f"unknown template {config.template!r}")
    if config.template == "contextual":
        missing = [i for i, ex in enumerate(examples) if not ex.get("context")]
        if missing:
            raise ValueError(
                f"contextual template needs 'context' on every example "
                f"(missing on {len(missing)} of {len(examples)})")

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    ctx = config.template == "contextual"
    encoded = [encode_tokens(
        checker_template(ex["premise"], ex["hypothesis"],
                         ex.get("context") if ctx else None),
        config.vocab_size) for ex in examples]
    labels = np.array([float(ex["label"]) for ex in examples], dtype=np.float32)

    order = rng.permutation(len(examples))
    n_val = max(1, int(len(examples) * config.val_fraction))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        raise ValueError("training set too small to hold out validation")
    val_flat, val_offsets = _encode_batch([encoded[i] for i in val_idx])
    val_labels = torch.tensor(labels[val_idx])

    net = _PairClassifier(config)
    optimizer = torch.optim.Adam(net.parameters(), lr=config.lr)
    loss_fn = nn.BCELoss()

    result = CheckerTrainingResult(model=CheckerModel(net, config), config=config)
    best_state = {k: v.clone() for k, v in net.state_dict().items()}
    since_best = 0

    for epoch in range(config.epochs):
        net.train()
        batch_order = rng.permutation(train_idx)
        losses, hits, seen = [], 0, 0
        for start in range(0, len(batch_order), config.batch_size):
            batch = batch_order[start:start + config.batch_size]
            flat, offsets = _encode_batch([encoded[i] for i in batch])
            batch_labels = torch.tensor(labels[batch])
            optimizer.zero_grad()
            out = net(flat, offsets)
            loss = loss_fn(out, batch_labels)
            loss.backward()
            optimizer.step()
            losses.append(loss.item())
            hits += int(((out >= config.threshold).float() == batch_labels).sum())
            seen += len(batch)

        net.eval()
        with torch.no_grad():
            val_out = net(val_flat, val_offsets)
        val_acc = float(((val_out >= config.threshold).float()
                         == val_labels).float().mean())
        result.train_loss.append(float(np.mean(losses)))
        result.train_accuracy.append(hits / seen)
        result.val_accuracy.append(val_acc)
        logger.info("epoch %d: loss=%.5f train_acc=%.3f val_acc=%.3f",
                    epoch, result.train_loss[-1], result.train_accuracy[-1],
                    val_acc)

        if val_acc > result.best_val_accuracy:
            result.best_val_accuracy = val_acc
            best_state = {k: v.clone() for k, v in net.state_dict().items()}
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                result.stopped_early = True
                break

    net.load_state_dict(best_state)
    net.eval()
    return result


def save_checker(model: CheckerModel, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "config.json").open("w", encoding="utf-8") as f:
        json.dump({"kind": "checker", **asdict(model.config)}, f, indent=2)
    torch.save(model.net.state_dict(), out_dir / "weights.pt")
    return out_dir


def load_checker(artifact_dir: str | Path) -> CheckerModel:
    artifact_dir = Path(artifact_dir)
    with (artifact_dir / "config.json").open("r", encoding="utf-8") as f:
        raw = json.load(f)
    raw.pop("kind", None)
    config = CheckerConfig(**raw)
    net = _PairClassifier(config)
    net.load_state_dict(torch.load(artifact_dir / "weights.pt",
                                   weights_only=True))
    return CheckerModel(net, config)
