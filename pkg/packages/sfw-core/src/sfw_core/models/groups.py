"""Pixel groups and group partitions of a (c, h, w) tensor."""

from __future__ import annotations

from itertools import combinations
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from sfw_core.errors import GroupBoundsError


def _intervals_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Return True if two half-open intervals share at least one index."""
    return a[0] < b[1] and b[0] < a[1]


class PixelGroup(BaseModel):
    """A rectangular block of pixels, optionally spanning several channels.

    The block selected in each channel is ``rows[0]:rows[1]`` by
    ``cols[0]:cols[1]``. Extracted as a matrix, the per-channel blocks are
    stacked vertically in increasing channel order.

    Attributes:
        channels: Sorted, distinct channel indices.
        rows: Half-open row interval ``(r0, r1)``.
        cols: Half-open column interval ``(c0, c1)``.
    """

    model_config = ConfigDict(frozen=True)

    channels: tuple[int, ...]
    rows: tuple[int, int]
    cols: tuple[int, int]

    @field_validator("channels")
    @classmethod
    def _normalize_channels(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        """Sort channels and reject empty, negative or repeated indices."""
        if not value:
            msg = "a pixel group needs at least one channel"
            raise ValueError(msg)
        if len(set(value)) != len(value):
            msg = "channel indices must be distinct"
            raise ValueError(msg)
        if min(value) < 0:
            msg = "channel indices must be nonnegative"
            raise ValueError(msg)
        return tuple(sorted(value))

    @model_validator(mode="after")
    def _validate_ranges(self) -> PixelGroup:
        """Validate that both intervals are nonempty and start at >= 0."""
        for name, (start, stop) in (("rows", self.rows), ("cols", self.cols)):
            if start < 0 or stop <= start:
                msg = f"{name} must be a nonempty half-open interval, got {start}:{stop}"
                raise ValueError(msg)
        return self

    @property
    def matrix_shape(self) -> tuple[int, int]:
        """Shape of the matrix produced by extracting this group."""
        height = self.rows[1] - self.rows[0]
        return (len(self.channels) * height, self.cols[1] - self.cols[0])

    @property
    def size(self) -> int:
        """Number of tensor entries covered by the group."""
        rows, cols = self.matrix_shape
        return rows * cols

    def check_bounds(self, shape: tuple[int, int, int]) -> None:
        """Raise if the group does not fit inside a tensor of ``shape``.

        Args:
            shape: Tensor shape ``(c, h, w)``.

        Raises:
            GroupBoundsError: If any index lies outside the tensor.
        """
        c, h, w = shape
        if self.channels[-1] >= c or self.rows[1] > h or self.cols[1] > w:
            msg = f"group exceeds tensor bounds: {self.describe()} vs shape {shape}"
            raise GroupBoundsError(msg)

    def overlaps(self, other: PixelGroup) -> bool:
        """Return True if the two groups share a pixel coordinate."""
        return (
            bool(set(self.channels) & set(other.channels))
            and _intervals_overlap(self.rows, other.rows)
            and _intervals_overlap(self.cols, other.cols)
        )

    def describe(self) -> str:
        """Render the group in the group-spec text syntax."""
        channels = ",".join(str(ch) for ch in self.channels)
        return (
            f"channels={channels} rows={self.rows[0]}:{self.rows[1]} "
            f"cols={self.cols[0]}:{self.cols[1]}"
        )


class GroupPartition(BaseModel):
    """An ordered set of disjoint pixel groups with positive weights.

    Pixels outside every group are not part of the partition; balls built
    on the partition never perturb them.

    Attributes:
        groups: Ordered, pairwise-disjoint pixel groups.
        weights: One strictly positive weight per group (defaults to 1).
    """

    model_config = ConfigDict(frozen=True)

    groups: tuple[PixelGroup, ...]
    weights: tuple[float, ...] = Field(default=())

    @model_validator(mode="before")
    @classmethod
    def _default_weights(cls, data: Any) -> Any:
        """Give every group weight 1 when no weights are supplied."""
        if isinstance(data, dict) and not data.get("weights"):
            data = {**data, "weights": (1.0,) * len(data.get("groups") or ())}
        return data

    @model_validator(mode="after")
    def _validate_partition(self) -> GroupPartition:
        """Check counts, positivity and disjointness."""
        if not self.groups:
            msg = "a partition needs at least one group"
            raise ValueError(msg)
        if len(self.weights) != len(self.groups):
            msg = f"expected {len(self.groups)} weights, got {len(self.weights)}"
            raise ValueError(msg)
        if any(not w > 0.0 for w in self.weights):
            msg = "group weights must be strictly positive"
            raise ValueError(msg)
        for (i, a), (j, b) in combinations(enumerate(self.groups), 2):
            if a.overlaps(b):
                msg = f"groups {i} and {j} overlap"
                raise ValueError(msg)
        return self

    def __len__(self) -> int:
        return len(self.groups)

    def check_bounds(self, shape: tuple[int, int, int]) -> None:
        """Raise ``GroupBoundsError`` if any group leaves the tensor."""
        for group in self.groups:
            group.check_bounds(shape)

    def with_weights(self, weights: tuple[float, ...] | list[float]) -> GroupPartition:
        """Return a copy of the partition carrying new weights."""
        return GroupPartition(groups=self.groups, weights=tuple(float(w) for w in weights))

    @classmethod
    def full_frame(cls, shape: tuple[int, int, int]) -> GroupPartition:
        """One group covering every channel and pixel."""
        c, h, w = shape
        return cls(groups=(PixelGroup(channels=tuple(range(c)), rows=(0, h), cols=(0, w)),))

    @classmethod
    def per_channel(cls, shape: tuple[int, int, int]) -> GroupPartition:
        """One full-frame group per channel."""
        c, h, w = shape
        return cls(
            groups=tuple(PixelGroup(channels=(ch,), rows=(0, h), cols=(0, w)) for ch in range(c))
        )

    @classmethod
    def grid(
        cls,
        shape: tuple[int, int, int],
        n_rows: int,
        n_cols: int,
        *,
        split_channels: bool = False,
    ) -> GroupPartition:
        """Tile the frame into an ``n_rows`` x ``n_cols`` grid of rectangles.

        Tile edges are spread as evenly as possible, so every pixel is
        covered. With ``split_channels`` each tile is repeated per channel;
        otherwise a tile spans all channels.

        Args:
            shape: Tensor shape ``(c, h, w)``.
            n_rows: Number of tile rows (1 <= n_rows <= h).
            n_cols: Number of tile columns (1 <= n_cols <= w).
            split_channels: Whether to build single-channel tiles.

        Returns:
            The grid partition with unit weights.
        """
        c, h, w = shape
        if not (1 <= n_rows <= h and 1 <= n_cols <= w):
            msg = f"grid {n_rows}x{n_cols} does not fit a {h}x{w} frame"
            raise ValueError(msg)
        row_edges = [round(i * h / n_rows) for i in range(n_rows + 1)]
        col_edges = [round(j * w / n_cols) for j in range(n_cols + 1)]
        channel_sets = [(ch,) for ch in range(c)] if split_channels else [tuple(range(c))]
        groups = [
            PixelGroup(
                channels=channels,
                rows=(row_edges[i], row_edges[i + 1]),
                cols=(col_edges[j], col_edges[j + 1]),
            )
            for channels in channel_sets
            for i in range(n_rows)
            for j in range(n_cols)
        ]
        return cls(groups=tuple(groups))
