"""Stub attacks for exercising the experiment harness."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from sfw_core.models.attack import AttackResult

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.attack import AttackConfig
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray


def identity_attack(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Return the image unchanged."""
    predicted = model.predict(x)
    loss, _ = model.input_gradient(x, spec)
    return AttackResult(
        x_adv=x.copy(),
        perturbation=np.zeros_like(x),
        success=spec.is_success(predicted),
        predicted=predicted,
        final_loss=loss,
        l2=0.0,
        nuclear=0.0,
        linf=0.0,
        nonzero_pixels=0,
    )


def flip_label_attack(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Oracle that reports the next class after the spec label as the prediction."""
    predicted = (spec.label + 1) % model.num_classes
    return AttackResult(
        x_adv=x.copy(),
        perturbation=np.zeros_like(x),
        success=True,
        predicted=predicted,
        final_loss=0.0,
        l2=0.0,
        nuclear=0.0,
        linf=0.0,
        nonzero_pixels=0,
    )
