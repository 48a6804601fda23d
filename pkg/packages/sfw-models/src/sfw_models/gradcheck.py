"""Finite-difference check of input gradients."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray

DENOMINATOR_FLOOR = 1e-8


def finite_diff_check(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    h: float = 1e-4,
    probes: int = 20,
    seed: int = 0,
) -> float:
    """Compare ``model.input_gradient`` with central differences.

    Args:
        model: Model under test.
        x: Input image.
        spec: Adversarial loss to differentiate.
        h: Central-difference half width.
        probes: Number of coordinates probed (capped at ``x.size``).
        seed: Seed for choosing the coordinates.

    Returns:
        The largest relative error ``|a - n| / max(|a|, |n|, 1e-8)``.
    """
    x = np.asarray(x, dtype=np.float64)
    _, analytic = model.input_gradient(x, spec)
    rng = np.random.default_rng(seed)
    coords = rng.choice(x.size, size=min(probes, x.size), replace=False)
    worst = 0.0
    for flat_index in coords:
        index = np.unravel_index(int(flat_index), x.shape)
        plus = x.copy()
        plus[index] += h
        minus = x.copy()
        minus[index] -= h
        numeric = (model.input_gradient(plus, spec)[0] - model.input_gradient(minus, spec)[0]) / (
            2.0 * h
        )
        exact = float(analytic[index])
        denom = max(abs(exact), abs(numeric), DENOMINATOR_FLOOR)
        worst = max(worst, abs(exact - numeric) / denom)
    return worst
