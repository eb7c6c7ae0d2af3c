"""Desk-scale decoder-only transformer: model, training, sampling, checkpoints."""

from .checkpoint import MAGIC, CorruptCheckpoint, load_checkpoint, save_checkpoint
from .model import (
    BadToken,
    InvalidConfig,
    Model,
    ModelConfig,
    SequenceTooLong,
    ShapeMismatch,
    forward,
    gradient_check,
    init_model,
    loss,
    loss_and_grads,
    param_count,
    param_shapes,
)
from .sample import ContextFull, SampleConfig, generate_game, generate_games, next_token_probs, sample_next
from .train import (
    REFERENCE_PLATEAU_LOSS,
    NonFinite,
    TrainConfig,
    load_curve,
    pad_batch,
    save_curve,
    smoothed,
    train,
)

__all__ = [
    "MAGIC",
    "BadToken",
    "ContextFull",
    "CorruptCheckpoint",
    "InvalidConfig",
    "Model",
    "ModelConfig",
    "NonFinite",
    "REFERENCE_PLATEAU_LOSS",
    "SampleConfig",
    "SequenceTooLong",
    "ShapeMismatch",
    "TrainConfig",
    "forward",
    "generate_game",
    "generate_games",
    "gradient_check",
    "init_model",
    "load_checkpoint",
    "load_curve",
    "loss",
    "loss_and_grads",
    "next_token_probs",
    "pad_batch",
    "param_count",
    "param_shapes",
    "sample_next",
    "save_checkpoint",
    "save_curve",
    "smoothed",
    "train",
]
