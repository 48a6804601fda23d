"""Norm balls, linear minimization oracles, and Frank-Wolfe solvers."""

from __future__ import annotations

from sfw_optim.balls import (
    LmoVertex,
    dual_norm_value,
    group_dual_norm,
    group_lmo,
    group_norm,
    lmo,
    norm_value,
    project,
    sample_in_ball,
)
from sfw_optim.frank_wolfe import (
    FwTrajectory,
    Objective,
    RecordOptions,
    frank_wolfe,
    frank_wolfe_block,
)
from sfw_optim.steps import fw_gap, short_step

__all__ = [
    "FwTrajectory",
    "LmoVertex",
    "Objective",
    "RecordOptions",
    "dual_norm_value",
    "frank_wolfe",
    "frank_wolfe_block",
    "fw_gap",
    "group_dual_norm",
    "group_lmo",
    "group_norm",
    "lmo",
    "norm_value",
    "project",
    "sample_in_ball",
    "short_step",
]
