"""Differentiable numpy classifiers, their training, and the adversarial loss."""

from __future__ import annotations

from sfw_models.base import ModelKind, NumpyClassifier, tanh_backward
from sfw_models.conv import TinyConv, tiny_conv
from sfw_models.gradcheck import finite_diff_check
from sfw_models.linear import LinearSoftmax, linear_softmax
from sfw_models.losses import (
    adversarial_loss,
    adversarial_objective,
    cross_entropy_and_grad,
    objective_for,
    softmax,
)
from sfw_models.mlp import MlpOneHidden, mlp_1hidden
from sfw_models.registry import ModelRegistry, default_registry
from sfw_models.serialization import format_model, load_model, parse_model, save_model
from sfw_models.synthetic import synth, synth_split
from sfw_models.training import TrainingResult, accuracy, train_sgd

__all__ = [
    "LinearSoftmax",
    "MlpOneHidden",
    "ModelKind",
    "ModelRegistry",
    "NumpyClassifier",
    "TinyConv",
    "TrainingResult",
    "accuracy",
    "adversarial_loss",
    "adversarial_objective",
    "cross_entropy_and_grad",
    "default_registry",
    "finite_diff_check",
    "format_model",
    "linear_softmax",
    "load_model",
    "mlp_1hidden",
    "objective_for",
    "parse_model",
    "save_model",
    "softmax",
    "synth",
    "synth_split",
    "tanh_backward",
    "tiny_conv",
    "train_sgd",
]
