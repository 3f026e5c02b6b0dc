"""Seeded first-order training and confusion-count evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..emotions import NUM_EMOTIONS
from ..errors import ConfigurationError, TrainingDivergedError
from .model import (
    ModelDims,
    ModelParams,
    ModelVariant,
    backward,
    cross_entropy_loss,
    forward,
    init_params,
)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 50
    batch_size: int = 32
    dropout_rate: float = 0.0
    seed: int = 0
    optimizer: str = "sgd"  # "sgd" | "momentum"
    momentum: float = 0.9
    embed_dim: int = 16
    conv_dim: int = 16
    lstm1_dim: int = 16
    lstm2_dim: int = 16

    def validate(self) -> None:
        # learning_rate 0 is tolerated by train() itself (a no-op run); the
        # strict check lives here so pipeline configs reject it up front.
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be > 0")
        self.validate_loose()

    def validate_loose(self) -> None:
        if self.learning_rate < 0:
            raise ConfigurationError("learning_rate must be >= 0")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigurationError("dropout_rate must lie in [0, 1)")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigurationError("epochs must be >= 0 and batch_size >= 1")
        if self.optimizer not in ("sgd", "momentum"):
            raise ConfigurationError(f"unknown optimizer: {self.optimizer!r}")


@dataclass
class TrainResult:
    params: ModelParams
    epoch_losses: list


def train(token_ids, mask, labels, vocab_size: int, config: TrainConfig,
          variant: ModelVariant) -> TrainResult:
    """Minimize the cross-entropy over the training arrays.

    Fully deterministic for a fixed config: initialization, epoch shuffles,
    and dropout all derive from one generator seeded with ``config.seed``.
    Updates use the batch-mean gradient so the learning rate is insensitive
    to batch size. A non-finite epoch loss aborts with the epoch number.
    """
    config.validate_loose()
    token_ids = np.asarray(token_ids)
    mask = np.asarray(mask, dtype=float)
    labels = np.asarray(labels)
    n = len(labels)
    if n == 0:
        raise ConfigurationError("training set is empty")

    dims = ModelDims(
        vocab_size=vocab_size,
        embed_dim=config.embed_dim,
        conv_dim=config.conv_dim,
        lstm1_dim=config.lstm1_dim,
        lstm2_dim=config.lstm2_dim,
    )
    rng = np.random.default_rng(config.seed)
    params = init_params(dims, variant, rng)
    velocity = {name: np.zeros_like(arr) for name, arr in params.named_arrays()}
    arrays = dict(params.named_arrays())

    losses = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            step_seed = int(rng.integers(0, 2 ** 63 - 1))
            tr = forward(token_ids[idx], mask[idx], params, mode="train",
                         dropout_rate=config.dropout_rate, seed=step_seed)
            total += cross_entropy_loss(tr.probs, labels[idx])
            grads = backward(tr, labels[idx], params)
            inv = 1.0 / len(idx)
            for name, arr in arrays.items():
                g = grads[name] * inv
                if config.optimizer == "momentum":
                    velocity[name] = config.momentum * velocity[name] + g
                    g = velocity[name]
                arr -= config.learning_rate * g
        epoch_loss = total / n
        if not math.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch=epoch, loss=epoch_loss)
        losses.append(epoch_loss)
    return TrainResult(params=params, epoch_losses=losses)


@dataclass(frozen=True)
class PredictionRecord:
    true_label: int
    predicted_label: int
    probs: tuple


@dataclass
class EvalResult:
    counts: np.ndarray  # (6, 6) ints: row = true label, column = prediction
    accuracy: float
    records: list


def evaluate_confusion_counts(params: ModelParams, token_ids, mask, labels,
                              chunk_size: int = 256) -> EvalResult:
    """Count (true, predicted) pairs over a labeled set in eval mode.

    The matrix row is the true label and the column the argmax prediction, so
    the entries across one row are what that emotion was recognized as.
    Accuracy is the diagonal total over the set size.
    """
    token_ids = np.asarray(token_ids)
    mask = np.asarray(mask, dtype=float)
    labels = np.asarray(labels)
    n = len(labels)
    if n == 0:
        raise ConfigurationError("evaluation set is empty")
    counts = np.zeros((NUM_EMOTIONS, NUM_EMOTIONS), dtype=np.int64)
    records = []
    for start in range(0, n, chunk_size):
        sl = slice(start, start + chunk_size)
        tr = forward(token_ids[sl], mask[sl], params, mode="eval")
        preds = tr.probs.argmax(axis=1)
        np.add.at(counts, (labels[sl], preds), 1)
        for y, p, row in zip(labels[sl], preds, tr.probs):
            records.append(PredictionRecord(int(y), int(p), tuple(float(v) for v in row)))
    accuracy = float(np.trace(counts) / n)
    return EvalResult(counts=counts, accuracy=accuracy, records=records)
