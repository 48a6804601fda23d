"""Binary PGM (P5) and PPM (P6) output for images and perturbation heatmaps."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from sfw_core.errors import ValidationFailure
from sfw_core.tensor import as_image_tensor

if TYPE_CHECKING:
    from sfw_core.tensor import FloatArray

logger = logging.getLogger(__name__)

MAXVAL = 255


def quantize(x: FloatArray) -> np.ndarray:
    """Map [0, 1] intensities to bytes with round-half-up, clipping outside values."""
    return np.clip(np.floor(np.asarray(x) * MAXVAL + 0.5), 0, MAXVAL).astype(np.uint8)


def encode_pnm(x: FloatArray, comment: str | None = None) -> bytes:
    """Encode a ``(1, h, w)`` or ``(3, h, w)`` image in [0, 1] as P5 or P6 bytes.

    Raises:
        ValidationFailure: For channel counts other than 1 and 3.
    """
    x = as_image_tensor(x)
    c, h, w = x.shape
    if c not in (1, 3):
        msg = f"PGM/PPM output supports 1 or 3 channels, got {c}"
        raise ValidationFailure(msg)
    magic = "P5" if c == 1 else "P6"
    header = magic + "\n"
    if comment is not None:
        header += f"# {comment}\n"
    header += f"{w} {h}\n{MAXVAL}\n"
    pixels = quantize(np.transpose(x, (1, 2, 0)))
    return header.encode("ascii") + pixels.tobytes()


def decode_pnm(data: bytes) -> tuple[FloatArray, list[str]]:
    """Decode P5/P6 bytes written by :func:`encode_pnm`.

    Returns:
        The image scaled to [0, 1] and the header comments.

    Raises:
        ValidationFailure: If the data is not a P5/P6 file with maxval 255.
    """
    tokens: list[str] = []
    comments: list[str] = []
    pos = 0
    while len(tokens) < 4:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii").strip()
        pos = end + 1
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            tokens.extend(line.split())
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic not in ("P5", "P6") or maxval != MAXVAL:
        msg = f"unsupported PNM header {magic} maxval={maxval}"
        raise ValidationFailure(msg)
    c = 1 if magic == "P5" else 3
    pixels = np.frombuffer(data, dtype=np.uint8, count=h * w * c, offset=pos)
    image = pixels.reshape(h, w, c).transpose(2, 0, 1).astype(np.float64) / MAXVAL
    return image, comments


def emit_image(x: FloatArray, path: Path | str) -> Path:
    """Write an image in [0, 1] as PGM (one channel) or PPM (three channels)."""
    path = Path(path)
    path.write_bytes(encode_pnm(x))
    logger.debug("Wrote image %s", path)
    return path


def emit_heatmap(delta: FloatArray, path: Path | str) -> Path:
    """Write ``|delta|`` rescaled so that its maximum maps to 255.

    The scale is recorded as a ``# max=...`` comment; an all-zero
    perturbation is written as zero bytes with ``max=0``. ``delta`` is not
    modified.
    """
    magnitude = np.abs(as_image_tensor(delta))
    top = float(magnitude.max())
    scaled = magnitude / top if top > 0.0 else np.zeros_like(magnitude)
    path = Path(path)
    path.write_bytes(encode_pnm(scaled, comment=f"max={top:.17g}"))
    logger.debug("Wrote heatmap %s (max=%g)", path, top)
    return path


def read_image(path: Path | str) -> FloatArray:
    """Read a PGM/PPM file written by :func:`emit_image`."""
    image, _ = decode_pnm(Path(path).read_bytes())
    return image
