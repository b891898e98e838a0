"""One-stage scoring model: a single regression pass over a text pair.

The model approximates the two-stage unit-recall score directly from the
concatenated pair ``[CLS] candidate [SEP] reference [SEP]``, trained with
mean squared error against the targets in a pre-training corpus (JSONL
records carrying ``candidate``, ``reference``, ``target_score``). The
encoder is deliberately small (hashed bag-of-tokens embeddings and one
hidden layer) so it trains in seconds on a CPU; the regression head on top
is a single linear layer. Model size is configuration, not a fidelity
claim.
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

from .encoding import encode_tokens, pair_template

logger = logging.getLogger(__name__)

__all__ = [
    "OneStageConfig",
    "OneStageModel",
    "TrainingResult",
    "load_corpus_shards",
    "load_one_stage",
    "save_one_stage",
    "train_one_stage",
]


@dataclass
class OneStageConfig:
    vocab_size: int = 4096
    embedding_dim: int = 64
    hidden_dim: int = 64
    epochs: int = 200
    lr: float = 0.05
    batch_size: int = 16
    val_fraction: float = 0.2
    patience: int = 25
    seed: int = 0


class _PairRegressor(nn.Module):
    def __init__(self, config: OneStageConfig):
        super().__init__()
        self.embedding = nn.EmbeddingBag(config.vocab_size,
                                         config.embedding_dim, mode="mean")
        self.hidden = nn.Linear(config.embedding_dim, config.hidden_dim)
        self.activation = nn.ReLU()
        # single linear layer mapping the hidden representation to the score
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


class OneStageModel:
    """A trained scorer: encode the pair, one forward pass, clamp to [0, 1]."""

    def __init__(self, net: _PairRegressor, config: OneStageConfig):
        self.net = net.eval()
        self.config = config

    @torch.no_grad()
    def predict(self, candidates: Sequence[str],
                references: Sequence[str]) -> list[float]:
        encoded = [encode_tokens(pair_template(c, r), self.config.vocab_size)
                   for c, r in zip(candidates, references)]
        flat, offsets = _encode_batch(encoded)
        out = self.net(flat, offsets)
        return [float(min(1.0, max(0.0, v))) for v in out.tolist()]

    def score(self, candidate: str, reference: str,
              direction: str = "recall") -> float:
        forward = self.predict([candidate], [reference])[0]
        if direction == "recall":
            return forward
        backward = self.predict([reference], [candidate])[0]
        if forward + backward == 0.0:
            return 0.0
        return 2.0 * forward * backward / (forward + backward)


@dataclass
class TrainingResult:
    model: OneStageModel
    config: OneStageConfig
    train_mse: list[float] = field(default_factory=list)
    val_mse: list[float] = field(default_factory=list)
    best_val_mse: float = float("inf")
    baseline_val_mse: float = float("inf")
    stopped_early: bool = False


def load_corpus_shards(paths: Sequence[str | Path]) -> list[dict]:
    records = []
    for path in paths:
        with Path(path).open("r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    records.append(json.loads(line))
    return records


def train_one_stage(corpus: Sequence[dict] | Sequence[str | Path],
                    config: OneStageConfig | None = None) -> TrainingResult:
    """Fit the regressor on corpus records with an MSE objective.

    ``corpus`` is either loaded records or paths to JSONL shards. A held-out
    validation split tracks generalization; the per-epoch validation MSE is
    logged, the best-scoring weights are kept, and the mean-predictor MSE on
    the validation split is reported as the baseline to beat.

    Failure modes: an empty corpus raises ``ValueError``; when the
    validation MSE stops improving for ``patience`` consecutive epochs,
    training stops early (``stopped_early=True``) and the best weights are
    restored rather than the last ones.
    """
    config = config or OneStageConfig()
    records = list(corpus)
    if records and not isinstance(records[0], dict):
        records = load_corpus_shards(records)  # type: ignore[arg-type]
    if not records:
        raise ValueError("empty corpus")
    for key in ("candidate", "reference", "target_score"):
        if key not in records[0]:
            raise ValueError(f"corpus records need a '{key}' field")

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    encoded = [encode_tokens(pair_template(r["candidate"], r["reference"]),
                             config.vocab_size) for r in records]
    targets = np.array([float(r["target_score"]) for r in records],
                       dtype=np.float32)

    order = rng.permutation(len(records))
    n_val = max(1, int(len(records) * config.val_fraction))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        raise ValueError("corpus too small to hold out a validation split")

    val_flat, val_offsets = _encode_batch([encoded[i] for i in val_idx])
    val_targets = torch.tensor(targets[val_idx])
    train_mean = float(targets[train_idx].mean())
    baseline = float(((targets[val_idx] - train_mean) ** 2).mean())

    net = _PairRegressor(config)
    optimizer = torch.optim.Adam(net.parameters(), lr=config.lr)
    loss_fn = nn.MSELoss()

    result = TrainingResult(model=OneStageModel(net, config), config=config,
                            baseline_val_mse=baseline)
    best_state = {k: v.clone() for k, v in net.state_dict().items()}
    epochs_since_best = 0

    for epoch in range(config.epochs):
        net.train()
        batch_order = rng.permutation(train_idx)
        epoch_losses = []
        for start in range(0, len(batch_order), config.batch_size):
            batch = batch_order[start:start + config.batch_size]
            flat, offsets = _encode_batch([encoded[i] for i in batch])
            batch_targets = torch.tensor(targets[batch])
            optimizer.zero_grad()
            loss = loss_fn(net(flat, offsets), batch_targets)
            loss.backward()
            optimizer.step()
            epoch_losses.append(loss.item())

        net.eval()
        with torch.no_grad():
            val_loss = float(loss_fn(net(val_flat, val_offsets), val_targets))
        result.train_mse.append(float(np.mean(epoch_losses)))
        result.val_mse.append(val_loss)
        logger.info("epoch %d: train_mse=%.5f val_mse=%.5f",
                    epoch, result.train_mse[-1], val_loss)

        if val_loss < result.best_val_mse:
            result.best_val_mse = val_loss
            best_state = {k: v.clone() for k, v in net.state_dict().items()}
            epochs_since_best = 0
        else:
            epochs_since_best += 1
            if epochs_since_best >= config.patience:
                result.stopped_early = True
                break

    net.load_state_dict(best_state)
    net.eval()
    return result


def save_one_stage(model: OneStageModel, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "config.json").open("w", encoding="utf-8") as f:
        json.dump({"kind": "one-stage", **asdict(model.config)}, f, indent=2)
    torch.save(model.net.state_dict(), out_dir / "weights.pt")
    return out_dir


def load_one_stage(artifact_dir: str | Path) -> OneStageModel:
    artifact_dir = Path(artifact_dir)
    with (artifact_dir / "config.json").open("r", encoding="utf-8") as f:
        raw = json.load(f)
    raw.pop("kind", None)
    config = OneStageConfig(**raw)
    net = _PairRegressor(config)
    net.load_state_dict(torch.load(artifact_dir / "weights.pt",
                                   weights_only=True))
    return OneStageModel(net, config)
