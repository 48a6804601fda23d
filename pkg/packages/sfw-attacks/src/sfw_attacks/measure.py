"""Box clamping and perturbation statistics shared by every attack."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from sfw_core.linalg import nuclear_norm
from sfw_core.models.attack import AttackResult, HistoryStep
from sfw_core.models.balls import Matricization
from sfw_core.tensor import FloatArray, matricize

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.loss import LossSpec

QUANTIZATION_LEVELS = 255


def clamp_box(x: FloatArray) -> FloatArray:
    """Entrywise ``min(1, max(0, x))``."""
    return np.clip(x, 0.0, 1.0)


def stacked_nuclear_norm(delta: FloatArray) -> float:
    """Nuclear norm of the ``(c*h) x w`` stacked matricization."""
    return nuclear_norm(matricize(delta, Matricization.STACKED)[0])


def quantized_nonzero(delta: FloatArray) -> int:
    """Count entries whose magnitude rounds half-up to at least 1 of 255."""
    levels = np.floor(np.abs(delta) * QUANTIZATION_LEVELS + 0.5)
    return int(np.count_nonzero(levels >= 1.0))


def build_result(
    model: GradientModel,
    x: FloatArray,
    x_adv: FloatArray,
    spec: LossSpec,
    *,
    pre_clamp: FloatArray | None = None,
    history: list[HistoryStep] | None = None,
) -> AttackResult:
    """Assemble an :class:`AttackResult`, recomputing every statistic from ``x_adv - x``.

    Args:
        model: Attacked model, used for the prediction and the final loss.
        x: Original image.
        x_adv: Emitted adversarial image.
        spec: Loss specification that defines success.
        pre_clamp: Iterate before final box clamping, if one was applied.
        history: Per-iteration records.
    """
    perturbation = x_adv - x
    final_loss, _ = model.input_gradient(x_adv, spec)
    predicted = model.predict(x_adv)
    pre_l2 = pre_nuclear = None
    if pre_clamp is not None:
        pre_delta = pre_clamp - x
        pre_l2 = float(np.linalg.norm(pre_delta))
        pre_nuclear = stacked_nuclear_norm(pre_delta)
    return AttackResult(
        x_adv=x_adv,
        perturbation=perturbation,
        success=spec.is_success(predicted),
        predicted=predicted,
        final_loss=final_loss,
        l2=float(np.linalg.norm(perturbation)),
        nuclear=stacked_nuclear_norm(perturbation),
        linf=float(np.max(np.abs(perturbation))) if perturbation.size else 0.0,
        nonzero_pixels=quantized_nonzero(perturbation),
        pre_clamp_l2=pre_l2,
        pre_clamp_nuclear=pre_nuclear,
        history=history,
    )
