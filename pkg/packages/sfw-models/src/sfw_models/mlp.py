"""One-hidden-layer tanh perceptron."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from sfw_models.base import ModelKind, NumpyClassifier, Params, tanh_backward

if TYPE_CHECKING:
    from collections.abc import Mapping

    from sfw_core.tensor import FloatArray

DEFAULT_HIDDEN = 32


class MlpOneHidden(NumpyClassifier):
    """``logits = W2 tanh(W1 vec(x) + b1) + b2``.

    Hyperparameters:
        hidden: Width of the hidden layer.
    """

    kind: ClassVar[ModelKind] = ModelKind.MLP

    @classmethod
    def param_shapes(
        cls,
        input_shape: tuple[int, ...],
        num_classes: int,
        hyper: Mapping[str, int],
    ) -> dict[str, tuple[int, ...]]:
        hidden = hyper.get("hidden", DEFAULT_HIDDEN)
        return {
            "W1": (hidden, math.prod(input_shape)),
            "b1": (hidden,),
            "W2": (num_classes, hidden),
            "b2": (num_classes,),
        }

    def forward(self, batch: FloatArray) -> tuple[FloatArray, Any]:
        p = self._params
        flat = batch.reshape(batch.shape[0], -1)
        hidden = np.tanh(flat @ p["W1"].T + p["b1"])
        return hidden @ p["W2"].T + p["b2"], (batch.shape, flat, hidden)

    def backward(self, cache: Any, dlogits: FloatArray) -> tuple[FloatArray, Params]:
        p = self._params
        shape, flat, hidden = cache
        dpre = tanh_backward(hidden, dlogits @ p["W2"])
        grads = {
            "W1": dpre.T @ flat,
            "b1": dpre.sum(axis=0),
            "W2": dlogits.T @ hidden,
            "b2": dlogits.sum(axis=0),
        }
        return (dpre @ p["W1"]).reshape(shape), grads


def mlp_1hidden(
    input_shape: tuple[int, int, int],
    num_classes: int,
    hidden: int = DEFAULT_HIDDEN,
    seed: int = 0,
) -> MlpOneHidden:
    """Build an MLP with Gaussian weights scaled by ``1/sqrt(fan_in)``."""
    rng = np.random.default_rng(seed)
    fan_in = math.prod(input_shape)
    params = {
        "W1": rng.standard_normal((hidden, fan_in)) / math.sqrt(fan_in),
        "b1": np.zeros(hidden),
        "W2": rng.standard_normal((num_classes, hidden)) / math.sqrt(hidden),
        "b2": np.zeros(num_classes),
    }
    return MlpOneHidden(input_shape, num_classes, params, {"hidden": hidden})
