"""Labelled image dataset."""

from __future__ import annotations

from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Dataset(BaseModel):
    """A stack of (c, h, w) images with integer class labels.

    Attributes:
        name: Identifier used in report metadata.
        images: Float64 array of shape ``(n, c, h, w)``.
        labels: Int64 array of shape ``(n,)``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    images: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]

    @field_validator("images", mode="before")
    @classmethod
    def _as_float_stack(cls, value: Any) -> npt.NDArray[np.float64]:
        """Coerce to a finite float64 array of rank 4."""
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 4:
            msg = f"images must have shape (n, c, h, w), got {array.shape}"
            raise ValueError(msg)
        if not np.all(np.isfinite(array)):
            msg = "images contain non-finite entries"
            raise ValueError(msg)
        return array

    @field_validator("labels", mode="before")
    @classmethod
    def _as_label_vector(cls, value: Any) -> npt.NDArray[np.int64]:
        """Coerce to a nonnegative int64 vector."""
        array = np.asarray(value, dtype=np.int64).reshape(-1)
        if array.size and array.min() < 0:
            msg = "labels must be nonnegative"
            raise ValueError(msg)
        return array

    @model_validator(mode="after")
    def _validate_lengths(self) -> Dataset:
        """Validate that images and labels have equal lengths."""
        if self.images.shape[0] != self.labels.shape[0]:
            msg = (
                f"image/label count mismatch: {self.images.shape[0]} images, "
                f"{self.labels.shape[0]} labels"
            )
            raise ValueError(msg)
        return self

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def image_shape(self) -> tuple[int, int, int]:
        """Shape ``(c, h, w)`` of one image."""
        _, c, h, w = self.images.shape
        return (int(c), int(h), int(w))

    @property
    def num_classes(self) -> int:
        """One more than the largest label present."""
        return int(self.labels.max()) + 1 if len(self) else 0

    def subset(self, indices: npt.ArrayLike, name: str | None = None) -> Dataset:
        """Return the images and labels at ``indices``."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            name=name or self.name,
            images=self.images[idx],
            labels=self.labels[idx],
        )
