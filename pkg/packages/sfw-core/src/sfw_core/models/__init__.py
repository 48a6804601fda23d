"""Domain models shared across the workspace."""

from __future__ import annotations

from sfw_core.models.attack import AttackConfig, AttackResult, HistoryStep
from sfw_core.models.balls import (
    BallKind,
    DistortionBall,
    GroupNuclearBall,
    GroupSelection,
    LpBall,
    Matricization,
    SchattenBall,
    with_radius,
)
from sfw_core.models.dataset import Dataset
from sfw_core.models.groups import GroupPartition, PixelGroup
from sfw_core.models.loss import LossMode, LossSpec
from sfw_core.models.report import (
    METRICS_COLUMNS,
    MetricsReport,
    MetricsRow,
    PerturbationStats,
    ReportMeta,
)
from sfw_core.models.steps import (
    Backtracking,
    Harmonic,
    ShortStep,
    StepKind,
    StepRule,
    parse_step_rule,
)

__all__ = [
    "METRICS_COLUMNS",
    "AttackConfig",
    "AttackResult",
    "Backtracking",
    "BallKind",
    "Dataset",
    "DistortionBall",
    "GroupNuclearBall",
    "GroupPartition",
    "GroupSelection",
    "Harmonic",
    "HistoryStep",
    "LossMode",
    "LossSpec",
    "LpBall",
    "Matricization",
    "MetricsReport",
    "MetricsRow",
    "PerturbationStats",
    "PixelGroup",
    "ReportMeta",
    "SchattenBall",
    "ShortStep",
    "StepKind",
    "StepRule",
    "parse_step_rule",
    "with_radius",
]
