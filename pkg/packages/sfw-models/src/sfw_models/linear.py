"""Affine softmax classifier."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from sfw_models.base import ModelKind, NumpyClassifier, Params

if TYPE_CHECKING:
    from collections.abc import Mapping

    from sfw_core.tensor import FloatArray


class LinearSoftmax(NumpyClassifier):
    """``logits = W vec(x) + b``."""

    kind: ClassVar[ModelKind] = ModelKind.LINEAR

    @classmethod
    def param_shapes(
        cls,
        input_shape: tuple[int, ...],
        num_classes: int,
        hyper: Mapping[str, int],
    ) -> dict[str, tuple[int, ...]]:
        """``W`` is ``(k, c*h*w)`` and ``b`` is ``(k,)``."""
        return {"W": (num_classes, math.prod(input_shape)), "b": (num_classes,)}

    def forward(self, batch: FloatArray) -> tuple[FloatArray, Any]:
        flat = batch.reshape(batch.shape[0], -1)
        return flat @ self._params["W"].T + self._params["b"], (batch.shape, flat)

    def backward(self, cache: Any, dlogits: FloatArray) -> tuple[FloatArray, Params]:
        shape, flat = cache
        grads = {"W": dlogits.T @ flat, "b": dlogits.sum(axis=0)}
        return (dlogits @ self._params["W"]).reshape(shape), grads


def linear_softmax(input_shape: tuple[int, int, int], num_classes: int) -> LinearSoftmax:
    """Build a zero-initialized linear softmax classifier."""
    shapes = LinearSoftmax.param_shapes(input_shape, num_classes, {})
    return LinearSoftmax(
        input_shape, num_classes, {name: np.zeros(shape) for name, shape in shapes.items()}
    )
