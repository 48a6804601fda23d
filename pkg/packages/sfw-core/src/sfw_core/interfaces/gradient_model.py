"""Differentiable classifier interface consumed by the attacks."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    import numpy.typing as npt

    from sfw_core.models.loss import LossSpec


class GradientModel(ABC):
    """Abstract base class for classifiers that expose input gradients.

    Implementations map a ``(c, h, w)`` image to class logits and return the
    adversarial loss together with its gradient with respect to the image.
    Instances are immutable, so calls are safe from parallel workers.
    """

    @property
    @abstractmethod
    def num_classes(self) -> int:
        """Number of output classes."""
        ...

    @property
    @abstractmethod
    def input_shape(self) -> tuple[int, int, int]:
        """Expected image shape ``(c, h, w)``."""
        ...

    @abstractmethod
    def logits(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Compute class logits for one image.

        Args:
            x: Image of shape ``input_shape``.

        Returns:
            Vector of ``num_classes`` logits.
        """
        ...

    @abstractmethod
    def input_gradient(
        self,
        x: npt.NDArray[np.float64],
        spec: LossSpec,
    ) -> tuple[float, npt.NDArray[np.float64]]:
        """Evaluate the adversarial loss and its gradient with respect to ``x``.

        Args:
            x: Image of shape ``input_shape``.
            spec: Which label the loss refers to and in which direction.

        Returns:
            ``(loss, grad)`` with ``grad`` shaped like ``x``.
        """
        ...

    def predict(self, x: npt.NDArray[np.float64]) -> int:
        """Return the arg-max class, ties broken to the lowest index."""
        return int(np.argmax(self.logits(x)))
