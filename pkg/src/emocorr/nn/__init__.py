"""The two sequence classifiers: exact forward semantics, hand-derived
gradients, seeded training, and confusion-count evaluation."""

from .checkpoint import load_checkpoint, save_checkpoint
from .model import (
    WINDOW,
    ForwardTrace,
    LstmLayerParams,
    LstmTrace,
    ModelDims,
    ModelParams,
    ModelVariant,
    backward,
    cross_entropy_loss,
    forward,
    forward_sequence,
    init_params,
    lstm_step,
    sigmoid,
    softmax,
)
from .training import (
    EvalResult,
    PredictionRecord,
    TrainConfig,
    TrainResult,
    evaluate_confusion_counts,
    train,
)

__all__ = [
    "WINDOW",
    "ForwardTrace",
    "LstmLayerParams",
    "LstmTrace",
    "ModelDims",
    "ModelParams",
    "ModelVariant",
    "backward",
    "cross_entropy_loss",
    "forward",
    "forward_sequence",
    "init_params",
    "lstm_step",
    "sigmoid",
    "softmax",
    "EvalResult",
    "PredictionRecord",
    "TrainConfig",
    "TrainResult",
    "evaluate_confusion_counts",
    "train",
    "load_checkpoint",
    "save_checkpoint",
]
