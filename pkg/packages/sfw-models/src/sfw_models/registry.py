"""Registry of classifier architectures keyed by model kind."""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Any

from sfw_models.base import ModelKind, NumpyClassifier

logger = logging.getLogger(__name__)

Constructor = Callable[..., NumpyClassifier]


class ModelRegistry:
    """Maps a :class:`ModelKind` to its class and default constructor.

    The class is used to rebuild serialized models; the constructor
    creates freshly initialized ones for training.

    Example:
        registry = ModelRegistry()
        registry.register(ModelKind.LINEAR, LinearSoftmax, linear_softmax)
        model = registry.create(ModelKind.LINEAR, (1, 16, 16), 2)
    """

    def __init__(self) -> None:
        """Initialize an empty registry."""
        self._entries: dict[ModelKind, tuple[type[NumpyClassifier], Constructor]] = {}

    def register(
        self,
        kind: ModelKind,
        cls: type[NumpyClassifier],
        constructor: Constructor,
    ) -> None:
        """Register an architecture.

        Raises:
            ValueError: If ``kind`` is already registered.
        """
        if kind in self._entries:
            msg = f"Model kind already registered: {kind.value}"
            raise ValueError(msg)
        self._entries[kind] = (cls, constructor)
        logger.debug("Registered model kind: %s -> %s", kind.value, cls.__name__)

    def model_class(self, kind: ModelKind | str) -> type[NumpyClassifier]:
        """Return the class registered for ``kind``.

        Raises:
            KeyError: If ``kind`` is unknown.
        """
        return self._lookup(kind)[0]

    def create(
        self,
        kind: ModelKind | str,
        input_shape: tuple[int, int, int],
        num_classes: int,
        **kwargs: Any,
    ) -> NumpyClassifier:
        """Build a freshly initialized classifier of ``kind``."""
        return self._lookup(kind)[1](input_shape, num_classes, **kwargs)

    def list_kinds(self) -> list[str]:
        """Sorted names of every registered kind."""
        return sorted(kind.value for kind in self._entries)

    def is_registered(self, kind: ModelKind | str) -> bool:
        """Check whether ``kind`` is registered."""
        try:
            return ModelKind(kind) in self._entries
        except ValueError:
            return False

    def _lookup(self, kind: ModelKind | str) -> tuple[type[NumpyClassifier], Constructor]:
        try:
            return self._entries[ModelKind(kind)]
        except (KeyError, ValueError) as exc:
            msg = f"No model registered for kind {kind!s}. Available: {self.list_kinds()}"
            raise KeyError(msg) from exc


def _build_default_registry() -> ModelRegistry:
    from sfw_models.conv import TinyConv, tiny_conv
    from sfw_models.linear import LinearSoftmax, linear_softmax
    from sfw_models.mlp import MlpOneHidden, mlp_1hidden

    registry = ModelRegistry()
    registry.register(ModelKind.LINEAR, LinearSoftmax, linear_softmax)
    registry.register(ModelKind.MLP, MlpOneHidden, mlp_1hidden)
    registry.register(ModelKind.CONV, TinyConv, tiny_conv)
    return registry


#: Registry with the built-in architectures.
default_registry: ModelRegistry = _build_default_registry()
