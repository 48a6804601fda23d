"""Step-size rules and the Frank-Wolfe duality gap."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict

from sfw_core.models.steps import Backtracking, Harmonic, ShortStep, StepRule  # noqa: TC001
from sfw_core.tensor import FloatArray, inner

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger(__name__)


def fw_gap(gradient: FloatArray, x: FloatArray, s: FloatArray) -> float:
    """Frank-Wolfe gap ``<-gradient, s - x>``."""
    return -inner(gradient, s - x)


def short_step(gradient: FloatArray, r: FloatArray, lipschitz: float) -> float:
    """Short step ``clip(<-gradient, r> / (L ||r||^2), 0, 1)``; 0 when ``r = 0``."""
    r_sq = inner(r, r)
    if r_sq == 0.0:
        return 0.0
    return float(np.clip(-inner(gradient, r) / (lipschitz * r_sq), 0.0, 1.0))


def harmonic_step(t: int) -> float:
    """Open-loop schedule ``2 / (t + 2)``; equals 1 at ``t = 0``."""
    return 2.0 / (t + 2.0)


class LineTrial(BaseModel):
    """Outcome of a backtracking search.

    Attributes:
        gamma: Accepted step (0 if no trial decreased the loss).
        loss: Loss at the accepted point, if a trial was accepted.
        gradient: Gradient at the accepted point, if a trial was accepted.
        evaluations: Objective evaluations spent.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: float
    loss: float | None = None
    gradient: FloatArray | None = None
    evaluations: int = 0


def backtracking_step(
    rule: Backtracking,
    evaluate: Callable[[float], tuple[float, FloatArray]],
    loss: float,
    slope: float,
) -> LineTrial:
    """Shrink the step from ``rule.init`` until the loss strictly decreases.

    Args:
        rule: Backtracking parameters.
        evaluate: Maps a trial step to ``(loss, gradient)`` at that point.
        loss: Loss at the current iterate.
        slope: Directional derivative ``<gradient, r>``; no search is run
            when it is nonnegative.

    Returns:
        The accepted trial, or ``gamma = 0`` if none decreased the loss.
    """
    if slope >= 0.0:
        return LineTrial(gamma=0.0)
    gamma = rule.init
    for attempt in range(rule.max_halvings + 1):
        trial_loss, trial_grad = evaluate(gamma)
        if math.isfinite(trial_loss) and trial_loss < loss:
            return LineTrial(
                gamma=gamma, loss=trial_loss, gradient=trial_grad, evaluations=attempt + 1
            )
        gamma *= rule.shrink
    logger.debug("Backtracking found no decrease after %d trials", rule.max_halvings + 1)
    return LineTrial(gamma=0.0, evaluations=rule.max_halvings + 1)


def open_loop_step(rule: StepRule, t: int, gradient: FloatArray, r: FloatArray) -> float:
    """Step for the rules that need no extra objective evaluations."""
    if isinstance(rule, ShortStep):
        return short_step(gradient, r, rule.lipschitz)
    if isinstance(rule, Harmonic):
        return harmonic_step(t)
    msg = f"step rule {rule.kind} needs objective evaluations"
    raise TypeError(msg)
