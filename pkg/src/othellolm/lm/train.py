"""Adam training loop with loss-curve recording.

Batches are padded to the longest sequence in the batch; padded target
positions are masked out of the loss.  With a fixed seed and
single-threaded math the run is bit-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..corpus import EOS_ID, Dataset
from .model import Model, loss_and_grads, param_shapes, _forward, loss

# Loss plateau reported for the original character-level fine-tuning
# setup; reference only, never asserted against this tokenizer.
REFERENCE_PLATEAU_LOSS = (0.69, 0.75)


class NonFinite(RuntimeError):
    """A loss or parameter went NaN/Inf during training."""


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 3e-4
    steps: int = 2000
    batch_size: int = 32
    seed: int = 0
    val_interval: int = 100
    eval_temperature: float = 1.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def pad_batch(sequences: list[list[int]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(inputs, targets, mask) padded with EOS to the batch maximum."""
    width = max(len(s) for s in sequences)
    ids = np.full((len(sequences), width), EOS_ID, dtype=np.int64)
    mask = np.zeros((len(sequences), width - 1), dtype=bool)
    for i, seq in enumerate(sequences):
        ids[i, : len(seq)] = seq
        mask[i, : len(seq) - 1] = True
    return ids[:, :-1], ids[:, 1:], mask


def _val_loss(model: Model, sequences: list[list[int]], batch_size: int) -> float:
    total, count = 0.0, 0
    for start in range(0, len(sequences), batch_size):
        chunk = sequences[start : start + batch_size]
        inputs, targets, mask = pad_batch(chunk)
        logits, _ = _forward(model.params, model.cfg, inputs, want_cache=False)
        n = int(mask.sum())
        total += loss(logits, targets, mask) * n
        count += n
    return total / count


def train(model: Model, dataset: Dataset, tcfg: TrainConfig) -> tuple[Model, list[dict]]:
    """Adam over shuffled minibatches; returns (trained model, loss curve).

    The curve holds one ``{"step", "train_loss"}`` record per step,
    with ``"val_loss"`` added every ``val_interval`` steps when the
    dataset has a validation split.
    """
    train_seqs = dataset.train_sequences
    if tcfg.steps and not train_seqs:
        raise ValueError("dataset has no training sequences")
    val_seqs = dataset.val_sequences

    trained = model.copy()
    params = trained.params
    dtype = trained.dtype
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    lr = dtype.type(tcfg.learning_rate)
    b1 = dtype.type(tcfg.beta1)
    b2 = dtype.type(tcfg.beta2)
    eps = dtype.type(tcfg.eps)

    rng = np.random.default_rng(tcfg.seed)
    order: list[int] = []
    curve: list[dict] = []

    for step in range(1, tcfg.steps + 1):
        while len(order) < tcfg.batch_size:
            order.extend(int(i) for i in rng.permutation(len(train_seqs)))
        batch = [train_seqs[i] for i in order[: tcfg.batch_size]]
        del order[: tcfg.batch_size]

        inputs, targets, mask = pad_batch(batch)
        value, grads = loss_and_grads(trained, inputs, targets, mask)
        if not np.isfinite(value):
            raise NonFinite(f"loss became non-finite at step {step}")

        # Adam with bias correction
        c1 = dtype.type(1.0 - tcfg.beta1**step)
        c2 = dtype.type(1.0 - tcfg.beta2**step)
        for name, _ in param_shapes(trained.cfg):
            g = grads[name]
            m[name] = b1 * m[name] + (1 - b1) * g
            v[name] = b2 * v[name] + (1 - b2) * (g * g)
            params[name] -= lr * (m[name] / c1) / (np.sqrt(v[name] / c2) + eps)
            if not np.isfinite(params[name]).all():
                raise NonFinite(f"parameter {name} became non-finite at step {step}")

        entry = {"step": step, "train_loss": float(value)}
        if val_seqs and step % tcfg.val_interval == 0:
            entry["val_loss"] = _val_loss(trained, val_seqs, tcfg.batch_size)
        curve.append(entry)

    return trained, curve


def save_curve(curve: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for entry in curve:
            f.write(json.dumps(entry))
            f.write("\n")


def load_curve(path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def smoothed(losses: list[float], window: int = 10) -> list[float]:
    """Moving average with a trailing window of the given size."""
    if window < 1:
        raise ValueError("window must be >= 1")
    out = []
    for i in range(len(losses) - window + 1):
        out.append(sum(losses[i : i + window]) / window)
    return out
