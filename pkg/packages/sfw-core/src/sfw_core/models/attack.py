"""Attack configuration and per-image attack outcome."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sfw_core.models.balls import DistortionBall  # noqa: TC001
from sfw_core.models.loss import LossMode
from sfw_core.models.steps import Backtracking, StepRule  # noqa: TC001


class AttackConfig(BaseModel):
    """Hyperparameters shared by every attack.

    Attributes:
        ball: Distortion set around the original image.
        steps: Number of iterations T.
        rule: Step-size rule for Frank-Wolfe attacks.
        step_size: Step size alpha for the PGD family.
        random_start: Start from a random point of the ball.
        seed: Seed of the per-image random stream.
        clamp_final: Clamp the final image to [0, 1].
        loss_mode: Untargeted or targeted loss.
        target_label: Target class when ``loss_mode`` is targeted.
        block_count: Number of groups sampled per randomized block
            Frank-Wolfe iteration; None runs the full LMO.
        record_history: Keep per-step (loss, gap, success) records.
    """

    model_config = ConfigDict(frozen=True)

    ball: DistortionBall
    steps: int = Field(default=20, ge=1)
    rule: StepRule = Field(default_factory=Backtracking)
    step_size: float | None = Field(default=None, gt=0.0)
    random_start: bool = False
    seed: int = 0
    clamp_final: bool = True
    loss_mode: LossMode = LossMode.UNTARGETED
    target_label: int | None = Field(default=None, ge=0)
    block_count: int | None = Field(default=None, ge=1)
    record_history: bool = False

    @model_validator(mode="after")
    def _validate_target(self) -> AttackConfig:
        """Validate that a targeted attack names its target."""
        if self.loss_mode is LossMode.TARGETED and self.target_label is None:
            msg = "targeted attacks need target_label"
            raise ValueError(msg)
        return self


class HistoryStep(BaseModel):
    """One recorded attack iteration.

    Attributes:
        loss: Adversarial objective at the iterate.
        gap: Frank-Wolfe gap (None for gradient-sign attacks).
        success: Whether the (unclamped) iterate already fools the model.
    """

    model_config = ConfigDict(frozen=True)

    loss: float
    gap: float | None = None
    success: bool


class AttackResult(BaseModel):
    """Outcome of attacking one image.

    All norms are recomputed from ``perturbation = x_adv - x_ori``. The
    nuclear norm uses the stacked ``(c*h) x w`` matricization.

    Attributes:
        x_adv: The adversarial image.
        perturbation: ``x_adv - x_ori``.
        success: Whether ``x_adv`` fools the model.
        predicted: Class predicted for ``x_adv``.
        final_loss: Adversarial objective at ``x_adv``.
        l2: Euclidean norm of the perturbation.
        nuclear: Nuclear norm of the perturbation.
        linf: Largest absolute perturbation entry.
        nonzero_pixels: Entries whose 8-bit quantized magnitude is >= 1.
        pre_clamp_l2: Euclidean norm before final clamping, if clamped.
        pre_clamp_nuclear: Nuclear norm before final clamping, if clamped.
        history: Optional per-iteration records.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x_adv: npt.NDArray[np.float64]
    perturbation: npt.NDArray[np.float64]
    success: bool
    predicted: int
    final_loss: float
    l2: float
    nuclear: float
    linf: float
    nonzero_pixels: int
    pre_clamp_l2: float | None = None
    pre_clamp_nuclear: float | None = None
    history: list[HistoryStep] | None = None
