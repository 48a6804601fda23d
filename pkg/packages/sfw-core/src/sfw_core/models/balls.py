"""Distortion-ball descriptions: the constraint sets of the attack problem."""

from __future__ import annotations

import enum
import math
from typing import Annotated, Literal

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, field_validator

from sfw_core.models.groups import GroupPartition  # noqa: TC001


class BallKind(enum.StrEnum):
    """Family of a distortion ball."""

    LP = "lp"
    SCHATTEN = "schatten"
    GROUP_NUCLEAR = "group_nuclear"


class Matricization(enum.StrEnum):
    """How a (c, h, w) tensor is viewed as matrices for spectral norms."""

    STACKED = "stacked"
    PER_CHANNEL = "per_channel"


class GroupSelection(enum.StrEnum):
    """Rule used by the group-nuclear LMO to pick the active group.

    ``SPECTRAL`` maximizes the weighted spectral norm, which is the exact
    linear minimizer. ``NUCLEAR`` maximizes the weighted nuclear norm as the
    group-LMO formula is commonly written; it is kept for comparison and is
    not optimal in general.
    """

    SPECTRAL = "spectral"
    NUCLEAR = "nuclear"


def _check_radius(value: float) -> float:
    if not math.isfinite(value) or value < 0.0:
        msg = f"radius must be finite and nonnegative, got {value}"
        raise ValueError(msg)
    return value


Radius = Annotated[float, AfterValidator(_check_radius)]


class LpBall(BaseModel):
    """Entrywise l_p ball, p in {1, 2, inf}.

    Attributes:
        p: The norm order.
        radius: Ball radius epsilon.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal[BallKind.LP] = BallKind.LP
    p: float
    radius: Radius

    @field_validator("p")
    @classmethod
    def _check_order(cls, value: float) -> float:
        """Only the orders 1, 2 and infinity are supported."""
        if value not in (1.0, 2.0, math.inf):
            msg = f"p must be 1, 2 or inf, got {value}"
            raise ValueError(msg)
        return value

    def describe(self) -> str:
        """Short label used in reports."""
        return "linf" if math.isinf(self.p) else f"l{int(self.p)}"


class SchattenBall(BaseModel):
    """Schatten-q ball on the matricized tensor (q = 1 is the nuclear ball).

    Attributes:
        q: Schatten order in [1, inf].
        radius: Ball radius epsilon.
        matricization: Stacked ``(c*h) x w`` matrix or one ``h x w`` matrix
            per channel.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal[BallKind.SCHATTEN] = BallKind.SCHATTEN
    q: float = 1.0
    radius: Radius
    matricization: Matricization = Matricization.STACKED

    @field_validator("q")
    @classmethod
    def _check_order(cls, value: float) -> float:
        """Schatten orders live in [1, inf]."""
        if math.isnan(value) or value < 1.0:
            msg = f"q must lie in [1, inf], got {value}"
            raise ValueError(msg)
        return value

    @property
    def is_nuclear(self) -> bool:
        """True for the q = 1 (trace norm) ball."""
        return self.q == 1.0

    @classmethod
    def nuclear(
        cls,
        radius: float,
        matricization: Matricization = Matricization.STACKED,
    ) -> SchattenBall:
        """Build a nuclear-norm ball."""
        return cls(q=1.0, radius=radius, matricization=matricization)

    def describe(self) -> str:
        """Short label used in reports."""
        base = "nuclear" if self.is_nuclear else f"schatten-{self.q:g}"
        if self.matricization is Matricization.PER_CHANNEL:
            return f"{base}/per-channel"
        return base


class GroupNuclearBall(BaseModel):
    """Weighted group-nuclear ball: sum_g w_g ||x[g]||_S1 <= radius.

    Attributes:
        partition: Disjoint pixel groups and their weights.
        radius: Ball radius epsilon.
        selection: Group selection rule used by the LMO.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal[BallKind.GROUP_NUCLEAR] = BallKind.GROUP_NUCLEAR
    partition: GroupPartition
    radius: Radius
    selection: GroupSelection = GroupSelection.SPECTRAL

    def describe(self) -> str:
        """Short label used in reports."""
        return f"groupnuclear[{len(self.partition)}]"


DistortionBall = Annotated[
    LpBall | SchattenBall | GroupNuclearBall,
    Field(discriminator="kind"),
]


def with_radius(ball: DistortionBall, radius: float) -> DistortionBall:
    """Return a copy of ``ball`` with a different radius."""
    return ball.model_copy(update={"radius": _check_radius(radius)})
