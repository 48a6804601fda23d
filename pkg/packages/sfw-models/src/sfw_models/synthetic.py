"""Seeded two-class synthetic image generator.

Class 0 images carry a smooth Gaussian blob (a rank-one pattern) centered
in the frame; class 1 images carry vertical stripes of alternating sign on
the central half of the frame. Both sit on a 0.5 background with additive
Gaussian noise and are clipped to [0, 1].
"""

from __future__ import annotations

import logging

import numpy as np

from sfw_core.errors import ValidationFailure
from sfw_core.models.dataset import Dataset

logger = logging.getLogger(__name__)

BACKGROUND = 0.5
BLOB_WIDTH = 2.5
BLOB_AMPLITUDE = (0.12, 0.18)
STRIPE_AMPLITUDE = (0.04, 0.06)
NOISE_SIGMA = 0.04
DEFAULT_SHAPE = (1, 16, 16)


def _blob(h: int, w: int) -> np.ndarray:
    rows = np.exp(-((np.arange(h) - h / 2) ** 2) / (2 * BLOB_WIDTH**2))
    cols = np.exp(-((np.arange(w) - w / 2) ** 2) / (2 * BLOB_WIDTH**2))
    return np.outer(rows, cols)


def _stripes(h: int, w: int) -> np.ndarray:
    pattern = np.zeros((h, w))
    signs = np.where(np.arange(w) % 2 == 0, 1.0, -1.0)
    pattern[h // 4 : 3 * h // 4, w // 4 : 3 * w // 4] = signs[w // 4 : 3 * w // 4]
    return pattern


def synth(seed: int, n: int, shape: tuple[int, int, int] = DEFAULT_SHAPE) -> Dataset:
    """Generate ``n`` labelled images, half of each class, in seeded order.

    Args:
        seed: Seed of the generator; equal seeds give identical datasets.
        n: Number of images.
        shape: Image shape ``(c, h, w)``; every channel gets the same pattern.

    Raises:
        ValidationFailure: If ``n`` is negative or the shape is degenerate.
    """
    c, h, w = shape
    if n < 0 or min(c, h, w) < 1:
        msg = f"synthetic dataset needs n >= 0 and a positive shape, got n={n} shape={shape}"
        raise ValidationFailure(msg)
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    rng.shuffle(labels)

    templates = (_blob(h, w), _stripes(h, w))
    amplitudes = (BLOB_AMPLITUDE, STRIPE_AMPLITUDE)
    images = np.empty((n, c, h, w))
    for i, label in enumerate(labels):
        low, high = amplitudes[label]
        clean = BACKGROUND + rng.uniform(low, high) * templates[label]
        images[i] = np.clip(clean + NOISE_SIGMA * rng.standard_normal((c, h, w)), 0.0, 1.0)
    logger.debug("Generated %d synthetic images of shape %s (seed %d)", n, shape, seed)
    return Dataset(name=f"synth-{seed}", images=images, labels=labels)


def synth_split(
    seed: int = 7,
    n_train: int = 400,
    n_test: int = 200,
    shape: tuple[int, int, int] = DEFAULT_SHAPE,
) -> tuple[Dataset, Dataset]:
    """Draw one synthetic dataset and split it into train and test parts."""
    full = synth(seed, n_train + n_test, shape)
    train = full.subset(np.arange(n_train), name=f"synth-{seed}-train")
    test = full.subset(np.arange(n_train, n_train + n_test), name=f"synth-{seed}-test")
    return train, test
