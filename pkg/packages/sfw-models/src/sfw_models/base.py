"""Shared machinery for the numpy classifiers.

Each architecture implements a batched forward pass that keeps what the
backward pass needs, and a backward pass that returns gradients with
respect to both the input batch and every parameter.
"""

from __future__ import annotations

import enum
from abc import abstractmethod
from typing import TYPE_CHECKING, Any, ClassVar, Self

import numpy as np

from sfw_core.errors import ShapeMismatchError
from sfw_core.interfaces.gradient_model import GradientModel
from sfw_core.tensor import FloatArray
from sfw_models.losses import adversarial_loss, batch_cross_entropy

if TYPE_CHECKING:
    from collections.abc import Mapping

    from sfw_core.models.loss import LossSpec

Params = dict[str, FloatArray]


class ModelKind(enum.StrEnum):
    """Architectures known to the serializer and the registry."""

    LINEAR = "linear"
    MLP = "mlp"
    CONV = "conv"


def tanh_backward(activation: FloatArray, upstream: FloatArray) -> FloatArray:
    """Backpropagate through ``a = tanh(z)`` given the activation ``a``."""
    return upstream * (1.0 - activation * activation)


class NumpyClassifier(GradientModel):
    """A classifier whose parameters are named float64 arrays.

    Instances never mutate their parameters; training produces new
    instances through :meth:`with_params`.

    Attributes:
        kind: Architecture tag used by serialization.
    """

    kind: ClassVar[ModelKind]

    def __init__(
        self,
        input_shape: tuple[int, int, int],
        num_classes: int,
        params: Mapping[str, FloatArray],
        hyper: Mapping[str, int] | None = None,
    ) -> None:
        """Initialize the classifier.

        Args:
            input_shape: Image shape ``(c, h, w)``.
            num_classes: Number of output classes.
            params: Named parameter arrays; copied and frozen.
            hyper: Integer hyperparameters (hidden width, filter count).

        Raises:
            ShapeMismatchError: If a parameter has the wrong shape.
        """
        self._input_shape = tuple(int(v) for v in input_shape)
        self._num_classes = int(num_classes)
        self._hyper = dict(hyper or {})
        expected = self.param_shapes(self._input_shape, self._num_classes, self._hyper)
        if set(params) != set(expected):
            msg = f"{self.kind} parameters must be {sorted(expected)}, got {sorted(params)}"
            raise ShapeMismatchError(msg)
        frozen: Params = {}
        for name, shape in expected.items():
            array = np.array(params[name], dtype=np.float64)
            if array.shape != shape:
                msg = f"parameter {name} has shape {array.shape}, expected {shape}"
                raise ShapeMismatchError(msg)
            array.setflags(write=False)
            frozen[name] = array
        self._params = frozen

    @classmethod
    @abstractmethod
    def param_shapes(
        cls,
        input_shape: tuple[int, ...],
        num_classes: int,
        hyper: Mapping[str, int],
    ) -> dict[str, tuple[int, ...]]:
        """Shapes of every parameter for the given configuration."""
        ...

    @abstractmethod
    def forward(self, batch: FloatArray) -> tuple[FloatArray, Any]:
        """Compute logits ``(n, num_classes)`` for a batch ``(n, c, h, w)``.

        Returns:
            The logits and a cache consumed by :meth:`backward`.
        """
        ...

    @abstractmethod
    def backward(self, cache: Any, dlogits: FloatArray) -> tuple[FloatArray, Params]:
        """Backpropagate logit gradients.

        Returns:
            Gradient with respect to the input batch and to each parameter.
        """
        ...

    @property
    def num_classes(self) -> int:
        """Number of output classes."""
        return self._num_classes

    @property
    def input_shape(self) -> tuple[int, int, int]:
        """Expected image shape ``(c, h, w)``."""
        c, h, w = self._input_shape
        return (c, h, w)

    @property
    def hyper(self) -> dict[str, int]:
        """Integer hyperparameters."""
        return dict(self._hyper)

    @property
    def params(self) -> Params:
        """Read-only views of the parameters."""
        return dict(self._params)

    def with_params(self, params: Mapping[str, FloatArray]) -> Self:
        """Return a classifier of the same architecture with new parameters."""
        return type(self)(self._input_shape, self._num_classes, params, self._hyper)

    def _check_image(self, x: FloatArray) -> None:
        if tuple(x.shape) != self._input_shape:
            msg = f"shape mismatch: input {x.shape} vs model {self._input_shape}"
            raise ShapeMismatchError(msg)

    def logits(self, x: FloatArray) -> FloatArray:
        """Compute class logits for one image."""
        self._check_image(x)
        logits, _ = self.forward(np.asarray(x, dtype=np.float64)[None])
        return logits[0]

    def batch_logits(self, batch: FloatArray) -> FloatArray:
        """Compute logits for a batch of images."""
        logits, _ = self.forward(np.asarray(batch, dtype=np.float64))
        return logits

    def input_gradient(self, x: FloatArray, spec: LossSpec) -> tuple[float, FloatArray]:
        """Adversarial loss at ``x`` and its exact gradient with respect to ``x``."""
        self._check_image(x)
        logits, cache = self.forward(np.asarray(x, dtype=np.float64)[None])
        loss, dlogits = adversarial_loss(logits[0], spec)
        dx, _ = self.backward(cache, dlogits[None])
        return loss, dx[0]

    def loss_and_param_grads(
        self,
        batch: FloatArray,
        labels: FloatArray,
    ) -> tuple[float, Params]:
        """Mean cross-entropy on a labelled batch and its parameter gradients."""
        logits, cache = self.forward(batch)
        loss, dlogits = batch_cross_entropy(logits, labels)
        _, grads = self.backward(cache, dlogits)
        return loss, grads
