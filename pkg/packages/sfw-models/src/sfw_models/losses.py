"""Softmax cross-entropy and the adversarial objective built on it."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from sfw_core.errors import ShapeMismatchError, ValidationFailure
from sfw_core.models.loss import LossMode

if TYPE_CHECKING:
    from collections.abc import Callable

    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray


def softmax(logits: FloatArray) -> FloatArray:
    """Softmax along the last axis, computed after subtracting the max."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def cross_entropy_and_grad(logits: FloatArray, label: int) -> tuple[float, FloatArray]:
    """Cross-entropy of one logit vector and its gradient.

    Args:
        logits: Vector of class scores.
        label: Index of the reference class.

    Returns:
        ``(-log softmax(logits)[label], softmax(logits) - onehot(label))``.

    Raises:
        ValidationFailure: If ``label`` is not a valid class index.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= label < logits.shape[-1]:
        msg = f"label {label} out of range for {logits.shape[-1]} classes"
        raise ValidationFailure(msg)
    shifted = logits - logits.max()
    log_norm = float(np.log(np.exp(shifted).sum()))
    loss = log_norm - float(shifted[label])
    dlogits = np.exp(shifted - log_norm)
    dlogits[label] -= 1.0
    return loss, dlogits


def batch_cross_entropy(logits: FloatArray, labels: FloatArray) -> tuple[float, FloatArray]:
    """Mean cross-entropy over a batch and its gradient with respect to the logits."""
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    loss = float(np.mean(log_norm - shifted[rows, labels]))
    dlogits = np.exp(shifted - log_norm[:, None])
    dlogits[rows, labels] -= 1.0
    return loss, dlogits / n


def adversarial_loss(logits: FloatArray, spec: LossSpec) -> tuple[float, FloatArray]:
    """Loss the attacker minimizes, and its gradient with respect to the logits.

    Targeted: cross-entropy of the target. Untargeted: the negated
    cross-entropy of the true label, so that minimizing pushes the
    prediction away from it.
    """
    loss, dlogits = cross_entropy_and_grad(logits, spec.label)
    if spec.mode is LossMode.UNTARGETED:
        return -loss, -dlogits
    return loss, dlogits


def adversarial_objective(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
) -> tuple[float, FloatArray]:
    """Evaluate the attacker's loss at ``x`` and its input gradient.

    Raises:
        ShapeMismatchError: If ``x`` does not match the model input.
    """
    if tuple(x.shape) != model.input_shape:
        msg = f"shape mismatch: input {x.shape} vs model {model.input_shape}"
        raise ShapeMismatchError(msg)
    return model.input_gradient(x, spec)


def objective_for(
    model: GradientModel,
    spec: LossSpec,
) -> Callable[[FloatArray], tuple[float, FloatArray]]:
    """Bind a model and loss spec into an ``x -> (loss, grad)`` callable."""

    def objective(x: FloatArray) -> tuple[float, FloatArray]:
        return adversarial_objective(model, x, spec)

    return objective
