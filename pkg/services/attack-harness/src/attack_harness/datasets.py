"""Dataset sources: IDX files, labelled CSV files and the synthetic generator.

IDX files are big-endian: a 4-byte magic (``0x00000803`` for unsigned-byte
images of rank 3, ``0x00000801`` for rank-1 labels), one 4-byte size per
dimension, then the raw bytes. Pixels are scaled to [0, 1].

Labelled CSV files start with a header ``n,c,h,w`` followed by ``n`` rows
``label,v_1,...,v_{c*h*w}`` in channel-major order.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from sfw_core.errors import BadMagicError, CountMismatchError, DatasetFormatError, TruncatedFileError
from sfw_core.models.dataset import Dataset
from sfw_models.synthetic import synth, synth_split

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


def _read_idx(path: Path, magic: int) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < 4:
        msg = f"{path}: file too short for an IDX header"
        raise TruncatedFileError(msg)
    (found,) = struct.unpack(">I", data[:4])
    if found != magic:
        msg = f"{path}: bad IDX magic 0x{found:08x}, expected 0x{magic:08x}"
        raise BadMagicError(msg)
    rank = magic & 0xFF
    header = 4 + 4 * rank
    if len(data) < header:
        msg = f"{path}: truncated IDX header"
        raise TruncatedFileError(msg)
    dims = struct.unpack(f">{rank}I", data[4:header])
    size = int(np.prod(dims))
    if len(data) - header < size:
        msg = f"{path}: expected {size} data bytes, found {len(data) - header}"
        raise TruncatedFileError(msg)
    return np.frombuffer(data, dtype=np.uint8, count=size, offset=header).reshape(dims)


def load_idx(images_path: Path | str, labels_path: Path | str, name: str | None = None) -> Dataset:
    """Load an IDX image file and its IDX label file.

    Raises:
        BadMagicError: If either file has the wrong magic number.
        TruncatedFileError: If either file is shorter than its header says.
        CountMismatchError: If the image and label counts differ.
    """
    images = _read_idx(Path(images_path), IDX_IMAGES_MAGIC)
    labels = _read_idx(Path(labels_path), IDX_LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        msg = f"image/label count mismatch: {images.shape[0]} images, {labels.shape[0]} labels"
        raise CountMismatchError(msg)
    dataset = Dataset(
        name=name or Path(images_path).stem,
        images=images[:, None, :, :].astype(np.float64) / 255.0,
        labels=labels.astype(np.int64),
    )
    logger.info("Loaded %d IDX images of shape %s from %s", len(dataset), dataset.image_shape, images_path)
    return dataset


def encode_idx(array: np.ndarray) -> bytes:
    """Encode an unsigned-byte array of rank 1 or 3 as IDX bytes."""
    array = np.asarray(array, dtype=np.uint8)
    magic = 0x00000800 | array.ndim
    return struct.pack(f">I{array.ndim}I", magic, *array.shape) + array.tobytes()


def load_csv(path: Path | str, name: str | None = None) -> Dataset:
    """Load a labelled CSV dataset.

    Raises:
        DatasetFormatError: On a malformed header or row.
        CountMismatchError: If the row count differs from the header.
    """
    path = Path(path)
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        msg = f"{path}: empty CSV dataset"
        raise DatasetFormatError(msg)
    try:
        n, c, h, w = (int(v) for v in lines[0].split(","))
    except ValueError as exc:
        msg = f"{path}: header must be n,c,h,w, got {lines[0]!r}"
        raise DatasetFormatError(msg) from exc
    rows = lines[1:]
    if len(rows) != n:
        msg = f"{path}: header declares {n} rows, found {len(rows)}"
        raise CountMismatchError(msg)
    size = c * h * w
    labels = np.empty(n, dtype=np.int64)
    images = np.empty((n, c, h, w))
    for i, row in enumerate(rows):
        fields = row.split(",")
        if len(fields) != size + 1:
            msg = f"{path}: row {i + 1} has {len(fields) - 1} values, expected {size}"
            raise DatasetFormatError(msg)
        try:
            labels[i] = int(fields[0])
            images[i] = np.array([float(v) for v in fields[1:]]).reshape(c, h, w)
        except ValueError as exc:
            msg = f"{path}: row {i + 1} is not numeric"
            raise DatasetFormatError(msg) from exc
    return Dataset(name=name or path.stem, images=images, labels=labels)


def format_csv(dataset: Dataset) -> str:
    """Render ``dataset`` in the labelled CSV format."""
    n = len(dataset)
    c, h, w = dataset.image_shape
    lines = [f"{n},{c},{h},{w}"]
    for image, label in zip(dataset.images, dataset.labels, strict=True):
        lines.append(",".join([str(int(label)), *(repr(float(v)) for v in image.ravel())]))
    return "\n".join(lines) + "\n"


def resolve_source(source: str, seed: int = 7) -> Dataset:
    """Load a dataset from a command-line source description.

    Accepted forms:
        ``synth[:train|test|all[:SEED]]`` the seeded two-class generator
            (400 train and 200 test images, seed 7 by default);
        ``idx:IMAGES,LABELS`` a pair of IDX files;
        ``csv:PATH`` or a path ending in ``.csv`` a labelled CSV file.

    Raises:
        DatasetFormatError: If the description is not understood.
    """
    kind, _, rest = source.partition(":")
    if kind == "synth":
        split, _, seed_text = rest.partition(":")
        split = split or "test"
        if seed_text:
            try:
                seed = int(seed_text)
            except ValueError as exc:
                msg = f"synthetic seed must be an integer, got {seed_text!r}"
                raise DatasetFormatError(msg) from exc
        train, test = synth_split(seed=seed)
        if split == "train":
            return train
        if split == "test":
            return test
        if split == "all":
            return synth(seed, len(train) + len(test))
        msg = f"unknown synthetic split {split!r}; use train, test or all"
        raise DatasetFormatError(msg)
    if kind == "idx":
        images, _, labels = rest.partition(",")
        if not labels:
            msg = "idx sources need two paths: idx:IMAGES,LABELS"
            raise DatasetFormatError(msg)
        return load_idx(images, labels)
    if kind == "csv":
        return load_csv(rest)
    if source.endswith(".csv"):
        return load_csv(source)
    msg = f"unknown data source {source!r}"
    raise DatasetFormatError(msg)
