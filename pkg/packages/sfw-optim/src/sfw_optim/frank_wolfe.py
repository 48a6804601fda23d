"""Vanilla and randomized block-coordinate Frank-Wolfe.

Both solvers work in perturbation coordinates: the ball is centered at
``center`` and the iterate is ``x_t = center + delta_t``. Each iteration
evaluates the objective once at ``x_t``, asks the LMO for the vertex
``s_t = lmo(ball, grad)``, and moves to ``(1 - gamma_t) delta_t + gamma_t s_t``.
The box [0, 1] is not enforced here.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sfw_core.errors import ShapeMismatchError, UnsupportedBallError, ValidationFailure
from sfw_core.models.balls import DistortionBall, GroupNuclearBall
from sfw_core.models.steps import Backtracking, StepRule
from sfw_core.tensor import FloatArray, inner
from sfw_optim.balls import lmo, norm_value
from sfw_optim.steps import backtracking_step, fw_gap, open_loop_step

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

Objective = Callable[[FloatArray], tuple[float, FloatArray]]

CONTAINMENT_TOLERANCE = 1e-6


class RecordOptions(BaseModel):
    """Which per-iteration quantities a run keeps.

    Losses, gaps and steps are scalars and recorded by default; iterates
    are full tensors and recorded only on request, every ``iterate_stride``
    iterations.
    """

    model_config = ConfigDict(frozen=True)

    losses: bool = True
    gaps: bool = True
    steps: bool = True
    iterates: bool = False
    iterate_stride: int = Field(default=1, ge=1)
    supports: bool = False


class FwTrajectory(BaseModel):
    """History and outcome of one Frank-Wolfe run.

    Entry ``t`` of ``losses``, ``gaps`` and ``steps`` describes iteration
    ``t``: the loss at ``x_t``, the gap of its vertex and the step taken.

    Attributes:
        iterates: ``(t, x_t)`` pairs kept according to ``RecordOptions``.
        losses: Loss at each visited iterate.
        gaps: Frank-Wolfe gap at each iteration.
        steps: Step size gamma_t of each iteration.
        supports: Group index of each vertex (None for non-group balls).
        final: Last valid iterate.
        final_loss: Loss at ``final``.
        iterations: Completed iterations.
        aborted: True if the objective became non-finite.
        diagnostic: Reason for an abort.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    iterates: list[tuple[int, FloatArray]] = Field(default_factory=list)
    losses: list[float] = Field(default_factory=list)
    gaps: list[float] = Field(default_factory=list)
    steps: list[float] = Field(default_factory=list)
    supports: list[int | None] = Field(default_factory=list)
    final: FloatArray
    final_loss: float
    iterations: int = 0
    aborted: bool = False
    diagnostic: str | None = None


def _finite(loss: float, grad: FloatArray) -> bool:
    return math.isfinite(loss) and bool(np.all(np.isfinite(grad)))


def _run(
    objective: Objective,
    ball: DistortionBall,
    center: FloatArray,
    start: FloatArray,
    steps: int,
    rule: StepRule,
    record: RecordOptions,
    choose_groups: Callable[[int], Sequence[int] | None],
) -> FwTrajectory:
    center = np.asarray(center, dtype=np.float64)
    start = np.asarray(start, dtype=np.float64)
    if center.shape != start.shape:
        msg = f"shape mismatch: center {center.shape} vs start {start.shape}"
        raise ShapeMismatchError(msg)
    if steps < 1:
        msg = f"steps must be at least 1, got {steps}"
        raise ValidationFailure(msg)
    delta = start - center
    if norm_value(ball, delta) > ball.radius + CONTAINMENT_TOLERANCE:
        msg = "start lies outside the ball around center"
        raise ValidationFailure(msg)

    loss, grad = objective(center + delta)
    if not _finite(loss, grad):
        msg = "objective is non-finite at the start point"
        logger.warning("Frank-Wolfe aborted: %s", msg)
        return FwTrajectory(final=start.copy(), final_loss=loss, aborted=True, diagnostic=msg)

    trajectory = FwTrajectory(final=start.copy(), final_loss=loss)
    for t in range(steps):
        vertex = lmo(ball, grad, active_groups=choose_groups(t))
        s = vertex.tensor
        r = s - delta
        gap = fw_gap(grad, delta, s)

        cached: tuple[float, FloatArray] | None = None
        if isinstance(rule, Backtracking):
            trial = backtracking_step(
                rule,
                lambda g: objective(center + ((1.0 - g) * delta + g * s)),  # noqa: B023
                loss,
                inner(grad, r),
            )
            gamma = trial.gamma
            if trial.loss is not None and trial.gradient is not None:
                cached = (trial.loss, trial.gradient)
        else:
            gamma = open_loop_step(rule, t, grad, r)

        if record.losses:
            trajectory.losses.append(loss)
        if record.gaps:
            trajectory.gaps.append(gap)
        if record.steps:
            trajectory.steps.append(gamma)
        if record.supports:
            trajectory.supports.append(vertex.group_index)
        if record.iterates and t % record.iterate_stride == 0:
            trajectory.iterates.append((t, center + delta))
        logger.debug("FW iteration %d: loss=%.6g gap=%.6g gamma=%.4g", t, loss, gap, gamma)

        next_delta = (1.0 - gamma) * delta + gamma * s
        next_loss, next_grad = cached if cached is not None else objective(center + next_delta)
        if not _finite(next_loss, next_grad):
            msg = f"objective became non-finite at iteration {t + 1}"
            logger.warning("Frank-Wolfe aborted: %s", msg)
            trajectory.aborted = True
            trajectory.diagnostic = msg
            break
        delta, loss, grad = next_delta, next_loss, next_grad
        trajectory.iterations = t + 1

    trajectory.final = center + delta
    trajectory.final_loss = loss
    return trajectory


def frank_wolfe(
    objective: Objective,
    ball: DistortionBall,
    center: FloatArray,
    start: FloatArray,
    steps: int,
    rule: StepRule,
    record: RecordOptions | None = None,
) -> FwTrajectory:
    """Minimize ``objective`` over ``center + ball`` with vanilla Frank-Wolfe.

    Args:
        objective: Maps ``x`` to ``(loss, gradient)``.
        ball: Constraint set, centered at ``center``.
        center: Ball center (the original image for attacks).
        start: Feasible starting point.
        steps: Number of iterations ``T >= 1``.
        rule: Step-size rule.
        record: What to keep per iteration.

    Returns:
        The trajectory. A non-finite objective stops the run early and
        keeps the last valid iterate.

    Raises:
        ValidationFailure: If ``start`` is infeasible or ``steps < 1``.
    """
    return _run(
        objective,
        ball,
        center,
        start,
        steps,
        rule,
        record or RecordOptions(),
        lambda _t: None,
    )


def frank_wolfe_block(
    objective: Objective,
    ball: DistortionBall,
    center: FloatArray,
    start: FloatArray,
    steps: int,
    rule: StepRule,
    block_count: int,
    seed: int,
    record: RecordOptions | None = None,
) -> FwTrajectory:
    """Randomized block Frank-Wolfe over a group-nuclear ball.

    Each iteration samples ``block_count`` groups uniformly without
    replacement and restricts the LMO to them. With every group sampled the
    run matches :func:`frank_wolfe` iterate for iterate.

    Raises:
        UnsupportedBallError: If ``ball`` is not group-nuclear.
        ValidationFailure: If ``block_count`` is outside ``[1, #groups]``.
    """
    if not isinstance(ball, GroupNuclearBall):
        msg = "randomized block Frank-Wolfe needs a group-nuclear ball"
        raise UnsupportedBallError(msg)
    n_groups = len(ball.partition)
    if not 1 <= block_count <= n_groups:
        msg = f"block_count must lie in [1, {n_groups}], got {block_count}"
        raise ValidationFailure(msg)
    rng = np.random.default_rng(seed)

    def choose(_t: int) -> list[int]:
        return sorted(int(i) for i in rng.choice(n_groups, size=block_count, replace=False))

    return _run(objective, ball, center, start, steps, rule, record or RecordOptions(), choose)
