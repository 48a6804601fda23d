"""Tiny convolutional classifier.

One 3x3 convolution (stride 1, zero padding 1) followed by tanh, a 2x2
average pool and an affine read-out. Odd spatial sizes drop their last
row or column before pooling.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from sfw_models.base import ModelKind, NumpyClassifier, Params, tanh_backward

if TYPE_CHECKING:
    from collections.abc import Mapping

    from sfw_core.tensor import FloatArray

DEFAULT_FILTERS = 4
KERNEL = 3


def _pooled_size(h: int, w: int) -> tuple[int, int]:
    return h // 2, w // 2


class TinyConv(NumpyClassifier):
    """Convolution, tanh, average pooling and an affine layer.

    Parameters are ``K (f, c, 3, 3)``, ``bk (f,)``, ``W (k, f*h2*w2)`` and
    ``b (k,)`` where ``h2, w2`` are the pooled sizes.
    """

    kind: ClassVar[ModelKind] = ModelKind.CONV

    @classmethod
    def param_shapes(
        cls,
        input_shape: tuple[int, ...],
        num_classes: int,
        hyper: Mapping[str, int],
    ) -> dict[str, tuple[int, ...]]:
        c, h, w = input_shape
        filters = hyper.get("filters", DEFAULT_FILTERS)
        h2, w2 = _pooled_size(h, w)
        return {
            "K": (filters, c, KERNEL, KERNEL),
            "bk": (filters,),
            "W": (num_classes, filters * h2 * w2),
            "b": (num_classes,),
        }

    def forward(self, batch: FloatArray) -> tuple[FloatArray, Any]:
        p = self._params
        n, _, h, w = batch.shape
        h2, w2 = _pooled_size(h, w)
        padded = np.pad(batch, ((0, 0), (0, 0), (1, 1), (1, 1)))
        windows = sliding_window_view(padded, (KERNEL, KERNEL), axis=(2, 3))
        pre = np.einsum("nchwij,fcij->nfhw", windows, p["K"]) + p["bk"][None, :, None, None]
        act = np.tanh(pre)
        filters = act.shape[1]
        pooled = act[:, :, : 2 * h2, : 2 * w2].reshape(n, filters, h2, 2, w2, 2).mean(axis=(3, 5))
        flat = pooled.reshape(n, -1)
        logits = flat @ p["W"].T + p["b"]
        return logits, (batch.shape, windows, act, flat)

    def backward(self, cache: Any, dlogits: FloatArray) -> tuple[FloatArray, Params]:
        p = self._params
        shape, windows, act, flat = cache
        n, c, h, w = shape
        h2, w2 = _pooled_size(h, w)
        filters = act.shape[1]

        dpooled = (dlogits @ p["W"]).reshape(n, filters, h2, w2)
        dact = np.zeros_like(act)
        dact[:, :, : 2 * h2, : 2 * w2] = np.repeat(np.repeat(dpooled, 2, axis=2), 2, axis=3) / 4.0
        dpre = tanh_backward(act, dact)

        grads = {
            "K": np.einsum("nchwij,nfhw->fcij", windows, dpre),
            "bk": dpre.sum(axis=(0, 2, 3)),
            "W": dlogits.T @ flat,
            "b": dlogits.sum(axis=0),
        }
        dpadded = np.zeros((n, c, h + 2, w + 2))
        for i in range(KERNEL):
            for j in range(KERNEL):
                dpadded[:, :, i : i + h, j : j + w] += np.einsum(
                    "nfhw,fc->nchw", dpre, p["K"][:, :, i, j]
                )
        return dpadded[:, :, 1:-1, 1:-1], grads


def tiny_conv(
    input_shape: tuple[int, int, int],
    num_classes: int,
    filters: int = DEFAULT_FILTERS,
    seed: int = 0,
) -> TinyConv:
    """Build a tiny convolutional classifier with seeded Gaussian weights."""
    rng = np.random.default_rng(seed)
    c, h, w = input_shape
    h2, w2 = _pooled_size(h, w)
    features = filters * h2 * w2
    params = {
        "K": rng.standard_normal((filters, c, KERNEL, KERNEL)) / math.sqrt(c * KERNEL * KERNEL),
        "bk": np.zeros(filters),
        "W": rng.standard_normal((num_classes, features)) / math.sqrt(features),
        "b": np.zeros(num_classes),
    }
    return TinyConv(input_shape, num_classes, params, {"filters": filters})
