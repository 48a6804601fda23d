"""Group-spec files and variance-adapted group weights.

A group-spec file lists one pixel group per line::

    # channel set, half-open row and column ranges, optional weight
    channels=0,1,2 rows=8:16 cols=0:8 weight=1.5
    channels=0 rows=0:8 cols=0:8

Blank lines and ``#`` comments are ignored. Missing weights default to 1.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from pydantic import ValidationError

from sfw_core.errors import ValidationFailure
from sfw_core.models.groups import GroupPartition, PixelGroup
from sfw_core.tensor import extract_group

if TYPE_CHECKING:
    from sfw_core.tensor import FloatArray

logger = logging.getLogger(__name__)


def _range(value: str, line: int) -> tuple[int, int]:
    start, sep, stop = value.partition(":")
    if sep and start.isdigit() and stop.isdigit():
        return int(start), int(stop)
    msg = f"group spec line {line}: range must be START:STOP, got {value!r}"
    raise ValidationFailure(msg)


def parse_group_spec(text: str, shape: tuple[int, int, int]) -> GroupPartition:
    """Parse group-spec text into a partition of a tensor of ``shape``.

    Raises:
        ValidationFailure: On unknown keys, malformed values, overlapping
            groups or groups outside the tensor.
    """
    groups: list[PixelGroup] = []
    weights: list[float] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields: dict[str, str] = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep or key not in {"channels", "rows", "cols", "weight"}:
                msg = f"group spec line {number}: unexpected token {token!r}"
                raise ValidationFailure(msg)
            fields[key] = value
        missing = {"channels", "rows", "cols"} - fields.keys()
        if missing:
            msg = f"group spec line {number}: missing {', '.join(sorted(missing))}"
            raise ValidationFailure(msg)
        try:
            channels = tuple(int(ch) for ch in fields["channels"].split(","))
            weight = float(fields.get("weight", "1"))
            groups.append(
                PixelGroup(
                    channels=channels,
                    rows=_range(fields["rows"], number),
                    cols=_range(fields["cols"], number),
                )
            )
        except ValidationFailure:
            raise
        except ValueError as exc:
            msg = f"group spec line {number}: {exc}"
            raise ValidationFailure(msg) from exc
        weights.append(weight)
    try:
        partition = GroupPartition(groups=tuple(groups), weights=tuple(weights))
    except ValidationError as exc:
        msg = f"invalid group spec: {exc.errors()[0]['msg']}"
        raise ValidationFailure(msg) from exc
    partition.check_bounds(shape)
    return partition


def load_group_spec(path: Path | str, shape: tuple[int, int, int]) -> GroupPartition:
    """Read a group-spec file."""
    partition = parse_group_spec(Path(path).read_text(encoding="utf-8"), shape)
    logger.info("Loaded %d groups from %s", len(partition), path)
    return partition


def load_weights(path: Path | str, partition: GroupPartition) -> GroupPartition:
    """Apply a weights file (one positive number per line, in group order).

    Raises:
        ValidationFailure: If the count or a value is invalid.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    try:
        weights = [float(ln) for ln in lines if ln]
        return partition.with_weights(weights)
    except (ValueError, ValidationError) as exc:
        msg = f"invalid weights file {path}: {exc}"
        raise ValidationFailure(msg) from exc


def variance_weights(x: FloatArray, partition: GroupPartition, kappa: float = 0.1) -> GroupPartition:
    """Weight each group by ``1 / (std(x[g]) + kappa)``.

    Low-variance groups get large weights and hence small budgets
    ``radius / w_g``.
    """
    weights = [1.0 / (float(np.std(extract_group(x, g))) + kappa) for g in partition.groups]
    return partition.with_weights(weights)
