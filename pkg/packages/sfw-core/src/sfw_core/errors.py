"""Exception hierarchy shared by every package in the workspace.

Validation failures describe bad inputs and subclass ``ValueError``;
computation failures describe runtime faults and subclass ``RuntimeError``.
The command-line harness maps the two families to distinct exit codes.
"""

from __future__ import annotations


class SfwError(Exception):
    """Base class for all structured Frank-Wolfe errors."""


class ValidationFailure(SfwError, ValueError):
    """An input violates a documented precondition."""


class ComputationFailure(SfwError, RuntimeError):
    """A computation could not complete."""


class ShapeMismatchError(ValidationFailure):
    """Two tensors (or a tensor and a ball) have incompatible shapes."""


class GroupBoundsError(ValidationFailure):
    """A pixel group reaches outside the tensor it is applied to."""


class UnsupportedBallError(ValidationFailure):
    """The requested operation is not available for this ball family."""


class ZeroMatrixError(ValidationFailure):
    """A dominant singular pair was requested for an all-zero matrix."""


class DatasetFormatError(ValidationFailure):
    """A dataset file could not be parsed."""


class BadMagicError(DatasetFormatError):
    """An IDX file starts with an unexpected magic number."""


class TruncatedFileError(DatasetFormatError):
    """A dataset file ends before its header says it should."""


class CountMismatchError(DatasetFormatError):
    """Image and label counts (or declared and actual rows) disagree."""


class TrainingDivergedError(ComputationFailure):
    """SGD produced a non-finite loss."""


class ModelFormatError(ValidationFailure):
    """A serialized model could not be parsed."""
