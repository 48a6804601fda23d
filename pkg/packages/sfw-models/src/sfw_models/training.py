"""Minibatch SGD for the numpy classifiers."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sfw_core.errors import ShapeMismatchError, TrainingDivergedError, ValidationFailure
from sfw_models.base import NumpyClassifier  # noqa: TC001

if TYPE_CHECKING:
    from sfw_core.models.dataset import Dataset

logger = logging.getLogger(__name__)


class TrainingResult(BaseModel):
    """A trained classifier and its training curve.

    Attributes:
        model: The classifier after the last epoch.
        train_accuracy: Fraction of training images classified correctly.
        epoch_losses: Mean minibatch loss of each epoch.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: NumpyClassifier
    train_accuracy: float
    epoch_losses: list[float] = Field(default_factory=list)


def accuracy(model: NumpyClassifier, dataset: Dataset) -> float:
    """Fraction of ``dataset`` that ``model`` classifies correctly."""
    if len(dataset) == 0:
        return 0.0
    predicted = model.batch_logits(dataset.images).argmax(axis=1)
    return float(np.mean(predicted == dataset.labels))


def _check_compatible(model: NumpyClassifier, dataset: Dataset) -> None:
    if len(dataset) == 0:
        msg = f"dataset {dataset.name} is empty"
        raise ValidationFailure(msg)
    if dataset.image_shape != model.input_shape:
        msg = f"shape mismatch: dataset images {dataset.image_shape} vs model {model.input_shape}"
        raise ShapeMismatchError(msg)
    if dataset.num_classes > model.num_classes:
        msg = f"dataset has label {dataset.num_classes - 1} but model has {model.num_classes} classes"
        raise ValidationFailure(msg)


def train_sgd(
    model: NumpyClassifier,
    dataset: Dataset,
    epochs: int,
    lr: float,
    seed: int,
    batch_size: int = 32,
) -> TrainingResult:
    """Fit ``model`` with plain minibatch SGD on mean cross-entropy.

    The sample order of each epoch is drawn from ``default_rng(seed)``, so
    the result is bit-identical for equal inputs.

    Args:
        model: Starting classifier; not modified.
        dataset: Labelled training images.
        epochs: Number of passes over the data; 0 returns ``model`` as is.
        lr: Learning rate.
        seed: Seed of the shuffling stream.
        batch_size: Images per update.

    Returns:
        The trained model with its final training accuracy.

    Raises:
        ValidationFailure: If the dataset is empty or does not fit the model.
        TrainingDivergedError: If a minibatch loss becomes non-finite.
    """
    _check_compatible(model, dataset)
    if epochs < 0 or lr <= 0.0 or batch_size < 1:
        msg = f"invalid SGD settings: epochs={epochs} lr={lr} batch_size={batch_size}"
        raise ValidationFailure(msg)

    rng = np.random.default_rng(seed)
    n = len(dataset)
    epoch_losses: list[float] = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        batch_losses: list[float] = []
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            loss, grads = model.loss_and_param_grads(dataset.images[idx], dataset.labels[idx])
            if not math.isfinite(loss):
                msg = f"non-finite training loss at epoch {epoch}, batch starting at {start}"
                logger.error("SGD diverged: %s (lr=%g)", msg, lr)
                raise TrainingDivergedError(msg)
            params = model.params
            model = model.with_params({name: params[name] - lr * grads[name] for name in params})
            batch_losses.append(loss)
        epoch_losses.append(float(np.mean(batch_losses)))
        logger.debug("Epoch %d: mean loss %.6f", epoch, epoch_losses[-1])

    train_accuracy = accuracy(model, dataset)
    logger.info(
        "Trained %s on %s: %d epochs, train accuracy %.4f",
        model.kind,
        dataset.name,
        epochs,
        train_accuracy,
    )
    return TrainingResult(model=model, train_accuracy=train_accuracy, epoch_losses=epoch_losses)
