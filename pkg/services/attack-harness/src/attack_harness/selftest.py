"""Invariant suite run by ``sfw selftest``.

Each check is small enough to finish in well under a second and reports a
one-line detail. A check that raises is reported as failed with the
exception text.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict

from attack_harness.imaging import encode_pnm
from sfw_attacks.frank_wolfe import fw_attack
from sfw_attacks.projected import fgsm, pgd
from sfw_core.linalg import numerical_rank
from sfw_core.models.attack import AttackConfig
from sfw_core.models.balls import (
    DistortionBall,
    GroupNuclearBall,
    LpBall,
    Matricization,
    SchattenBall,
)
from sfw_core.models.groups import GroupPartition
from sfw_core.models.loss import LossSpec
from sfw_core.models.steps import Harmonic, ShortStep
from sfw_core.tensor import FloatArray, matricize
from sfw_models.conv import tiny_conv
from sfw_models.gradcheck import finite_diff_check
from sfw_models.linear import linear_softmax
from sfw_models.mlp import mlp_1hidden
from sfw_optim.balls import dual_norm_value, lmo, norm_value, sample_in_ball
from sfw_optim.frank_wolfe import frank_wolfe, frank_wolfe_block

logger = logging.getLogger(__name__)

SHAPE = (1, 8, 8)
ORACLE_DIRECTIONS = 100
ORACLE_SAMPLES = 1000


class CheckOutcome(BaseModel):
    """Result of one self-test check."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str


Check = Callable[[], tuple[bool, str]]


def _balls() -> list[DistortionBall]:
    return [
        LpBall(p=1.0, radius=0.7),
        LpBall(p=2.0, radius=0.7),
        LpBall(p=math.inf, radius=0.05),
        SchattenBall.nuclear(1.3),
        SchattenBall(q=2.5, radius=1.3),
        SchattenBall(q=math.inf, radius=0.4),
        GroupNuclearBall(
            partition=GroupPartition.grid(SHAPE, 2, 2).with_weights([1.0, 2.0, 0.5, 1.5]),
            radius=1.1,
        ),
    ]


def check_lmo_optimality() -> tuple[bool, str]:
    """The LMO attains ``-radius * dual_norm(d)`` and beats sampled ball points."""
    rng = np.random.default_rng(0)
    worst = 0.0
    for index, ball in enumerate(_balls()):
        points = np.stack(
            [
                sample_in_ball(ball, SHAPE, rng_seed=ORACLE_SAMPLES * index + k).reshape(-1)
                for k in range(ORACLE_SAMPLES)
            ]
        )
        for _ in range(ORACLE_DIRECTIONS):
            d = rng.standard_normal(SHAPE)
            value = float(np.vdot(d, lmo(ball, d).tensor))
            target = -ball.radius * dual_norm_value(ball, d)
            worst = max(worst, abs(value - target) / abs(target))
            if float((points @ d.reshape(-1)).min()) < value - 1e-9:
                return False, f"{ball.describe()}: sampled point beats the LMO"
    return worst < 1e-8, f"max relative deviation {worst:.2e}"


def check_full_frame_group() -> tuple[bool, str]:
    """A single full-frame group reproduces the nuclear ball."""
    rng = np.random.default_rng(1)
    nuclear = SchattenBall.nuclear(1.0)
    group = GroupNuclearBall(partition=GroupPartition.full_frame(SHAPE), radius=1.0)
    worst = 0.0
    for _ in range(10):
        d = rng.standard_normal(SHAPE)
        worst = max(
            worst,
            abs(norm_value(nuclear, d) - norm_value(group, d)),
            abs(dual_norm_value(nuclear, d) - dual_norm_value(group, d)),
            abs(float(np.vdot(d, lmo(nuclear, d).tensor - lmo(group, d).tensor))),
        )
    return worst < 1e-8, f"max difference {worst:.2e}"


def check_gradients() -> tuple[bool, str]:
    """Manual backpropagation agrees with central differences."""
    rng = np.random.default_rng(2)
    linear = linear_softmax(SHAPE, 3)
    linear = linear.with_params(
        {name: rng.normal(scale=0.3, size=p.shape) for name, p in linear.params.items()}
    )
    models = {
        "linear": linear,
        "mlp": mlp_1hidden(SHAPE, 3, hidden=8, seed=3),
        "conv": tiny_conv(SHAPE, 3, filters=2, seed=4),
    }
    worst = 0.0
    for model in models.values():
        for trial in range(3):
            x = rng.uniform(size=SHAPE)
            worst = max(worst, finite_diff_check(model, x, LossSpec.untargeted(trial), seed=trial))
    return worst < 1e-4, f"max relative error {worst:.2e}"


def check_rank_growth() -> tuple[bool, str]:
    """Five Frank-Wolfe steps on the nuclear ball give rank at most five."""
    model = mlp_1hidden(SHAPE, 3, hidden=8, seed=5)
    cfg = AttackConfig(
        ball=SchattenBall.nuclear(2.0), steps=5, rule=Harmonic(), clamp_final=False
    )
    rng = np.random.default_rng(5)
    highest = 0
    for _ in range(10):
        x = rng.uniform(size=SHAPE)
        result = fw_attack(model, x, LossSpec.untargeted(0), cfg)
        (matrix,) = matricize(result.perturbation, Matricization.STACKED)
        highest = max(highest, numerical_rank(matrix))
    return highest <= 5, f"highest rank {highest}"


def check_fgsm_is_one_step_pgd() -> tuple[bool, str]:
    """FGSM equals PGD with one step of size epsilon, bit for bit."""
    model = mlp_1hidden(SHAPE, 3, hidden=8, seed=6)
    x = np.random.default_rng(6).uniform(size=SHAPE)
    ball = LpBall(p=math.inf, radius=0.03)
    spec = LossSpec.untargeted(1)
    one = fgsm(model, x, spec, AttackConfig(ball=ball, steps=1))
    other = pgd(model, x, spec, AttackConfig(ball=ball, steps=1, step_size=0.03))
    same = bool(np.array_equal(one.x_adv, other.x_adv))
    return same, "identical" if same else "iterates differ"


def check_block_with_all_groups() -> tuple[bool, str]:
    """Randomized block Frank-Wolfe over every group matches vanilla Frank-Wolfe."""
    rng = np.random.default_rng(7)
    z = rng.standard_normal(SHAPE)

    def objective(x: FloatArray) -> tuple[float, FloatArray]:
        return 0.5 * float(np.sum((x - z) ** 2)), x - z

    ball = GroupNuclearBall(partition=GroupPartition.grid(SHAPE, 2, 2), radius=1.0)
    center = np.zeros(SHAPE)
    vanilla = frank_wolfe(objective, ball, center, center, 30, ShortStep(lipschitz=1.0))
    block = frank_wolfe_block(
        objective, ball, center, center, 30, ShortStep(lipschitz=1.0), block_count=4, seed=7
    )
    deviation = float(np.max(np.abs(vanilla.final - block.final)))
    return deviation < 1e-12, f"max deviation {deviation:.2e}"


def check_pnm_rounding() -> tuple[bool, str]:
    """Intensity 0.5 is written as byte 128."""
    data = encode_pnm(np.full((1, 2, 2), 0.5))
    pixels = set(data[-4:])
    return pixels == {128}, f"bytes {sorted(pixels)}"


#: Checks in execution order.
CHECKS: dict[str, Check] = {
    "lmo_optimality": check_lmo_optimality,
    "full_frame_group_is_nuclear": check_full_frame_group,
    "gradient_fidelity": check_gradients,
    "rank_growth": check_rank_growth,
    "fgsm_is_one_step_pgd": check_fgsm_is_one_step_pgd,
    "block_with_all_groups": check_block_with_all_groups,
    "pnm_rounding": check_pnm_rounding,
}


def run_selftest(checks: dict[str, Check] | None = None) -> list[CheckOutcome]:
    """Run every check and collect the outcomes."""
    outcomes = []
    for name, check in (checks or CHECKS).items():
        try:
            passed, detail = check()
        except Exception as exc:  # noqa: BLE001
            logger.exception("Self-test check %s raised", name)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        outcomes.append(CheckOutcome(name=name, passed=passed, detail=detail))
    return outcomes
