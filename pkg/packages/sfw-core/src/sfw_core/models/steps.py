"""Step-size rules for the Frank-Wolfe update."""

from __future__ import annotations

import enum
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field


class StepKind(enum.StrEnum):
    """Discriminator of the step-size rule."""

    SHORT = "short"
    BACKTRACK = "backtrack"
    HARMONIC = "harmonic"


class ShortStep(BaseModel):
    """Short step: clip((<-g, s - x>) / (L ||s - x||^2), 0, 1).

    Attributes:
        lipschitz: Upper bound L on the gradient Lipschitz constant.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal[StepKind.SHORT] = StepKind.SHORT
    lipschitz: float = Field(gt=0.0)


class Backtracking(BaseModel):
    """Halve the step from ``init`` until the loss decreases, else take 0.

    Attributes:
        init: First trial step in (0, 1].
        shrink: Multiplicative shrink factor in (0, 1).
        max_halvings: Number of shrinks tried before giving up.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal[StepKind.BACKTRACK] = StepKind.BACKTRACK
    init: float = Field(default=1.0, gt=0.0, le=1.0)
    shrink: float = Field(default=0.5, gt=0.0, lt=1.0)
    max_halvings: int = Field(default=30, ge=0)


class Harmonic(BaseModel):
    """Parameter-free schedule gamma_t = 2 / (t + 2)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal[StepKind.HARMONIC] = StepKind.HARMONIC


StepRule = Annotated[ShortStep | Backtracking | Harmonic, Field(discriminator="kind")]


def parse_step_rule(text: str) -> ShortStep | Backtracking | Harmonic:
    """Parse the command-line form of a step rule.

    Accepted forms are ``short:L``, ``backtrack`` and ``harmonic``.

    Args:
        text: The rule description.

    Returns:
        The corresponding step-rule model.

    Raises:
        ValueError: If the text is not a recognised rule.
    """
    name, _, arg = text.strip().partition(":")
    if name == StepKind.SHORT:
        if not arg:
            msg = "short step needs a Lipschitz constant, e.g. short:1.0"
            raise ValueError(msg)
        return ShortStep(lipschitz=float(arg))
    if name == StepKind.BACKTRACK and not arg:
        return Backtracking()
    if name == StepKind.HARMONIC and not arg:
        return Harmonic()
    msg = f"unknown step rule {text!r}; expected short:L, backtrack or harmonic"
    raise ValueError(msg)
