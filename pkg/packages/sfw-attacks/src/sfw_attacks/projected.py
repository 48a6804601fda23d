"""Projected gradient attacks: FGSM, PGD on the l_inf ball, and nuclear PGD.

PGD clips to [0, 1] after every step. Nuclear PGD projects the perturbation
onto the nuclear ball only and clamps to the box once at the end, the same
policy as the Frank-Wolfe attack.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from sfw_attacks.measure import build_result, clamp_box
from sfw_core.errors import UnsupportedBallError, ValidationFailure
from sfw_core.models.attack import AttackConfig, AttackResult, HistoryStep
from sfw_core.models.balls import LpBall, SchattenBall
from sfw_core.tensor import as_image_tensor, image_shape
from sfw_optim.balls import project, sample_in_ball

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray

logger = logging.getLogger(__name__)


def _linf_radius(cfg: AttackConfig, attack: str) -> float:
    ball = cfg.ball
    if not (isinstance(ball, LpBall) and math.isinf(ball.p)):
        msg = f"{attack} needs an l_inf ball, got {ball.describe()}"
        raise UnsupportedBallError(msg)
    return ball.radius


def _step_size(cfg: AttackConfig, attack: str) -> float:
    if cfg.step_size is None:
        msg = f"{attack} needs a step_size"
        raise ValidationFailure(msg)
    return cfg.step_size


def _record(
    model: GradientModel,
    spec: LossSpec,
    loss: float,
    x: FloatArray,
) -> HistoryStep:
    return HistoryStep(loss=loss, success=spec.is_success(model.predict(x)))


def _sign_descent(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
    *,
    eps: float,
    alpha: float,
    steps: int,
    random_start: bool,
) -> AttackResult:
    lower, upper = x - eps, x + eps
    x_t = x.copy()
    if random_start:
        x_t = clamp_box(x + np.random.default_rng(cfg.seed).uniform(-eps, eps, size=x.shape))
    history: list[HistoryStep] | None = [] if cfg.record_history else None
    for _ in range(steps):
        loss, grad = model.input_gradient(x_t, spec)
        if history is not None:
            history.append(_record(model, spec, loss, x_t))
        x_t = clamp_box(np.clip(x_t - alpha * np.sign(grad), lower, upper))
    return build_result(model, x, x_t, spec, history=history)


def fgsm(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Fast gradient sign method: one signed step of size epsilon.

    Equivalent to :func:`pgd` with one step, ``step_size = radius`` and no
    random start.

    Raises:
        UnsupportedBallError: If ``cfg.ball`` is not an l_inf ball.
    """
    x = as_image_tensor(x)
    eps = _linf_radius(cfg, "FGSM")
    return _sign_descent(model, x, spec, cfg, eps=eps, alpha=eps, steps=1, random_start=False)


def pgd(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Projected sign-gradient descent on the l_inf ball intersected with [0, 1].

    Raises:
        UnsupportedBallError: If ``cfg.ball`` is not an l_inf ball.
        ValidationFailure: If ``cfg.step_size`` is missing.
    """
    x = as_image_tensor(x)
    eps = _linf_radius(cfg, "PGD")
    return _sign_descent(
        model,
        x,
        spec,
        cfg,
        eps=eps,
        alpha=_step_size(cfg, "PGD"),
        steps=cfg.steps,
        random_start=cfg.random_start,
    )


def pgd_nucl(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Projected gradient descent on a nuclear ball.

    Each step moves the perturbation along the plain (unsigned) negative
    gradient of the adversarial loss and projects it back onto the ball.

    Raises:
        UnsupportedBallError: If ``cfg.ball`` is not a nuclear ball.
        ValidationFailure: If ``cfg.step_size`` is missing.
    """
    x = as_image_tensor(x)
    ball = cfg.ball
    if not (isinstance(ball, SchattenBall) and ball.is_nuclear):
        msg = f"PGDnucl needs a nuclear ball, got {ball.describe()}"
        raise UnsupportedBallError(msg)
    alpha = _step_size(cfg, "PGDnucl")
    delta = np.zeros_like(x)
    if cfg.random_start:
        delta = sample_in_ball(ball, image_shape(x), cfg.seed)
    history: list[HistoryStep] | None = [] if cfg.record_history else None
    for _ in range(cfg.steps):
        loss, grad = model.input_gradient(x + delta, spec)
        if history is not None:
            history.append(_record(model, spec, loss, x + delta))
        delta = project(ball, delta - alpha * grad)
    final = x + delta
    if cfg.clamp_final:
        return build_result(model, x, clamp_box(final), spec, pre_clamp=final, history=history)
    return build_result(model, x, final, spec, history=history)
