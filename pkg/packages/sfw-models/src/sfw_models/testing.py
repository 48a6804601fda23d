"""Analytic gradient models for unit tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from sfw_core.interfaces.gradient_model import GradientModel
from sfw_models.losses import adversarial_loss

if TYPE_CHECKING:
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray


class MeanIntensityModel(GradientModel):
    """Two-class model with logits ``(-s, s)`` where ``s = scale * (mean(x) - threshold)``.

    Images brighter than ``threshold`` are class 1. Gradients are exact,
    so attacks and the harness can be tested without training.
    """

    def __init__(
        self,
        input_shape: tuple[int, int, int] = (1, 4, 4),
        scale: float = 20.0,
        threshold: float = 0.5,
    ) -> None:
        """Initialize the model.

        Args:
            input_shape: Expected image shape.
            scale: Logit slope.
            threshold: Mean intensity at the decision boundary.
        """
        self._input_shape = input_shape
        self._scale = scale
        self._threshold = threshold

    @property
    def num_classes(self) -> int:
        """Always two."""
        return 2

    @property
    def input_shape(self) -> tuple[int, int, int]:
        """Expected image shape."""
        return self._input_shape

    def logits(self, x: FloatArray) -> FloatArray:
        """Return ``(-s, s)``."""
        s = self._scale * (float(np.mean(x)) - self._threshold)
        return np.array([-s, s])

    def input_gradient(self, x: FloatArray, spec: LossSpec) -> tuple[float, FloatArray]:
        """Chain the loss gradient through ``ds/dx = scale / x.size``."""
        loss, dlogits = adversarial_loss(self.logits(x), spec)
        ds = dlogits[1] - dlogits[0]
        return loss, np.full(np.shape(x), ds * self._scale / np.size(x))
