"""Fine-tuning of an encoder with four sigmoid heads, reciprocal class
weights, early stopping, and best-checkpoint selection."""

from .weights import ClassWeights, compute_class_weights
from .early_stopping import EarlyStopper, simulate_early_stopping
from .model import (
    Checkpoint,
    ModelConfig,
    TrainHistory,
    decide,
    predict,
    train,
)
from .tune import tune

__all__ = [
    "ClassWeights",
    "compute_class_weights",
    "EarlyStopper",
    "simulate_early_stopping",
    "ModelConfig",
    "Checkpoint",
    "TrainHistory",
    "train",
    "predict",
    "decide",
    "tune",
]
