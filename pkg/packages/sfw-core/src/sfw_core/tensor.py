"""Image tensors: validation, matricization, group extraction, CSV form.

An image tensor is a float64 ``numpy`` array of shape ``(c, h, w)``. Clean
dataset images lie in [0, 1]; perturbations may be negative.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

from sfw_core.errors import ShapeMismatchError, ValidationFailure
from sfw_core.models.balls import Matricization

if TYPE_CHECKING:
    from collections.abc import Sequence

    from sfw_core.models.groups import PixelGroup

FloatArray = npt.NDArray[np.float64]


def as_image_tensor(value: Any, *, clean: bool = False) -> FloatArray:
    """Validate and convert ``value`` to a ``(c, h, w)`` float64 array.

    Args:
        value: Anything ``numpy.asarray`` accepts.
        clean: Additionally require every entry to lie in [0, 1].

    Returns:
        A float64 array of rank 3.

    Raises:
        ValidationFailure: On wrong rank, empty axes, non-finite entries,
            or out-of-range entries when ``clean`` is set.
    """
    array = np.asarray(value, dtype=np.float64)
    if array.ndim != 3 or min(array.shape) < 1:
        msg = f"image tensors have shape (c, h, w) with positive sizes, got {array.shape}"
        raise ValidationFailure(msg)
    if not np.all(np.isfinite(array)):
        msg = "image tensor contains NaN or Inf"
        raise ValidationFailure(msg)
    if clean and (array.min() < 0.0 or array.max() > 1.0):
        msg = "clean images must lie in [0, 1]"
        raise ValidationFailure(msg)
    return array


def check_same_shape(a: FloatArray, b: FloatArray) -> None:
    """Raise ``ShapeMismatchError`` unless both arrays share a shape."""
    if a.shape != b.shape:
        msg = f"shape mismatch: {a.shape} vs {b.shape}"
        raise ShapeMismatchError(msg)


def image_shape(x: FloatArray) -> tuple[int, int, int]:
    """Return ``x.shape`` as a typed ``(c, h, w)`` triple."""
    c, h, w = x.shape
    return (int(c), int(h), int(w))


def inner(a: FloatArray, b: FloatArray) -> float:
    """Entrywise (Frobenius) inner product."""
    return float(np.vdot(a, b))


def matricize(x: FloatArray, mode: Matricization = Matricization.STACKED) -> list[FloatArray]:
    """View a tensor as matrices for spectral norms.

    ``STACKED`` returns one ``(c*h) x w`` matrix whose rows ``k*h:(k+1)*h``
    are channel ``k``. ``PER_CHANNEL`` returns ``c`` matrices of shape
    ``h x w``. Both are returned as lists so callers treat them uniformly.
    The matrices are copies.
    """
    c, h, w = image_shape(x)
    if mode is Matricization.STACKED:
        return [x.reshape(c * h, w).copy()]
    return [x[ch].copy() for ch in range(c)]


def dematricize(
    matrices: Sequence[FloatArray],
    mode: Matricization,
    shape: tuple[int, int, int],
) -> FloatArray:
    """Inverse of :func:`matricize`."""
    c, h, w = shape
    if mode is Matricization.STACKED:
        (matrix,) = matrices
        return np.asarray(matrix, dtype=np.float64).reshape(c, h, w).copy()
    if len(matrices) != c:
        msg = f"expected {c} channel matrices, got {len(matrices)}"
        raise ShapeMismatchError(msg)
    return np.stack([np.asarray(m, dtype=np.float64) for m in matrices]).reshape(c, h, w)


def extract_group(x: FloatArray, group: PixelGroup) -> FloatArray:
    """Copy the entries of ``group`` out of ``x`` as a matrix.

    The per-channel rectangles are stacked vertically in increasing channel
    order, giving a ``(|channels| * rows) x cols`` matrix.

    Raises:
        GroupBoundsError: If the group does not fit ``x``.
    """
    group.check_bounds(image_shape(x))
    (r0, r1), (c0, c1) = group.rows, group.cols
    return np.vstack([x[ch, r0:r1, c0:c1] for ch in group.channels])


def scatter_group(matrix: FloatArray, group: PixelGroup, out: FloatArray) -> FloatArray:
    """Write a group matrix back into ``out`` in place and return ``out``."""
    group.check_bounds(image_shape(out))
    if matrix.shape != group.matrix_shape:
        msg = f"group matrix has shape {matrix.shape}, expected {group.matrix_shape}"
        raise ShapeMismatchError(msg)
    (r0, r1), (c0, c1) = group.rows, group.cols
    height = r1 - r0
    for k, ch in enumerate(group.channels):
        out[ch, r0:r1, c0:c1] = matrix[k * height : (k + 1) * height]
    return out


def format_tensor_csv(x: FloatArray) -> str:
    """Serialize a tensor as ``c,h,w`` then one line of ``c*h*w`` reals."""
    c, h, w = image_shape(x)
    values = ",".join(format(float(v), ".17g") for v in x.reshape(-1))
    return f"{c},{h},{w}\n{values}\n"


def parse_tensor_csv(text: str) -> FloatArray:
    """Parse the output of :func:`format_tensor_csv`.

    Raises:
        ValidationFailure: On a malformed header or a wrong value count.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        msg = "empty tensor CSV"
        raise ValidationFailure(msg)
    try:
        c, h, w = (int(v) for v in lines[0].split(","))
    except ValueError as exc:
        msg = f"tensor CSV header must be 'c,h,w', got {lines[0]!r}"
        raise ValidationFailure(msg) from exc
    values = [float(v) for line in lines[1:] for v in line.split(",") if v.strip()]
    if len(values) != c * h * w:
        msg = f"tensor CSV declares {c * h * w} values, found {len(values)}"
        raise ValidationFailure(msg)
    return as_image_tensor(np.asarray(values, dtype=np.float64).reshape(c, h, w))


def write_tensor_csv(x: FloatArray, path: Path | str) -> None:
    """Write a tensor CSV file."""
    Path(path).write_text(format_tensor_csv(x), encoding="utf-8")


def read_tensor_csv(path: Path | str) -> FloatArray:
    """Read a tensor CSV file."""
    return parse_tensor_csv(Path(path).read_text(encoding="utf-8"))
