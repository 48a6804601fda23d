"""Frank-Wolfe structured attack (FWnucl on nuclear and group-nuclear balls)."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from sfw_attacks.measure import build_result, clamp_box
from sfw_core.models.attack import AttackConfig, AttackResult, HistoryStep
from sfw_core.tensor import as_image_tensor, image_shape
from sfw_models.losses import objective_for
from sfw_optim.balls import sample_in_ball
from sfw_optim.frank_wolfe import FwTrajectory, RecordOptions, frank_wolfe, frank_wolfe_block

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.loss import LossSpec
    from sfw_core.tensor import FloatArray

logger = logging.getLogger(__name__)


def _history(
    model: GradientModel,
    spec: LossSpec,
    trajectory: FwTrajectory,
) -> list[HistoryStep]:
    return [
        HistoryStep(loss=loss, gap=gap, success=spec.is_success(model.predict(x_t)))
        for (_, x_t), loss, gap in zip(
            trajectory.iterates, trajectory.losses, trajectory.gaps, strict=True
        )
    ]


def fw_attack(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    """Minimize the adversarial loss over ``x + ball`` with Frank-Wolfe.

    The run starts at ``x`` (or at a random point of the ball when
    ``cfg.random_start``), uses randomized block sampling when
    ``cfg.block_count`` is set, and clamps the last iterate to [0, 1] when
    ``cfg.clamp_final``. Success and norms are measured on the emitted
    image; the pre-clamp norms are kept alongside.

    Raises:
        ValidationFailure: Propagated from the solver (infeasible start,
            block count out of range, wrong ball family for block sampling).
    """
    x = as_image_tensor(x)
    start = x
    if cfg.random_start:
        start = x + sample_in_ball(cfg.ball, image_shape(x), cfg.seed)
    record = RecordOptions(iterates=cfg.record_history)
    objective = objective_for(model, spec)
    if cfg.block_count is not None:
        trajectory = frank_wolfe_block(
            objective, cfg.ball, x, start, cfg.steps, cfg.rule, cfg.block_count, cfg.seed, record
        )
    else:
        trajectory = frank_wolfe(objective, cfg.ball, x, start, cfg.steps, cfg.rule, record)
    if trajectory.aborted:
        logger.warning("Frank-Wolfe attack stopped early: %s", trajectory.diagnostic)

    history = _history(model, spec, trajectory) if cfg.record_history else None
    final = trajectory.final
    if cfg.clamp_final:
        return build_result(model, x, clamp_box(final), spec, pre_clamp=final, history=history)
    return build_result(model, x, final, spec, history=history)
