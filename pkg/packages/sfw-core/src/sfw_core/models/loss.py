"""Adversarial loss specification."""

from __future__ import annotations

import enum

from pydantic import BaseModel, ConfigDict, Field


class LossMode(enum.StrEnum):
    """Whether the attack pushes away from a label or toward one."""

    UNTARGETED = "untargeted"
    TARGETED = "targeted"


class LossSpec(BaseModel):
    """Which label the adversarial loss refers to.

    For ``UNTARGETED`` the label is the true class and the loss to minimize
    is the negated cross-entropy of that class. For ``TARGETED`` the label is
    the target class and the loss is its cross-entropy.

    Attributes:
        mode: Untargeted or targeted.
        label: True label (untargeted) or target label (targeted).
    """

    model_config = ConfigDict(frozen=True)

    mode: LossMode = LossMode.UNTARGETED
    label: int = Field(ge=0)

    @classmethod
    def untargeted(cls, true_label: int) -> LossSpec:
        """Build an untargeted spec for ``true_label``."""
        return cls(mode=LossMode.UNTARGETED, label=true_label)

    @classmethod
    def targeted(cls, target_label: int) -> LossSpec:
        """Build a targeted spec for ``target_label``."""
        return cls(mode=LossMode.TARGETED, label=target_label)

    def is_success(self, predicted: int) -> bool:
        """Return whether a predicted class counts as a successful attack."""
        if self.mode is LossMode.TARGETED:
            return predicted == self.label
        return predicted != self.label
