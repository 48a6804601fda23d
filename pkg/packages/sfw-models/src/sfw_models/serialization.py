"""Versioned plain-text model format.

A file starts with a header naming the format version, the model kind,
the input shape, the class count and the integer hyperparameters. Each
parameter follows as a ``param NAME d1 d2 ...`` line and its values in
row-major order, one row of the last axis per line, written with 17
significant digits so that reading restores every float exactly::

    sfw-model v1
    kind linear
    input_shape 1 16 16
    num_classes 2
    hyper
    param W 2 256
    0.012 -0.5 ...
    param b 2
    0.1 -0.1
    end
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from sfw_core.errors import ModelFormatError
from sfw_models.base import ModelKind, NumpyClassifier
from sfw_models.registry import ModelRegistry, default_registry

logger = logging.getLogger(__name__)

FORMAT_HEADER = "sfw-model v1"


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def format_model(model: NumpyClassifier) -> str:
    """Render ``model`` in the text format."""
    hyper = " ".join(f"{key}={value}" for key, value in sorted(model.hyper.items()))
    lines = [
        FORMAT_HEADER,
        f"kind {model.kind.value}",
        "input_shape " + " ".join(str(v) for v in model.input_shape),
        f"num_classes {model.num_classes}",
        f"hyper {hyper}".rstrip(),
    ]
    for name, array in model.params.items():
        lines.append(f"param {name} " + " ".join(str(d) for d in array.shape))
        rows = array.reshape(-1, array.shape[-1]) if array.ndim else array.reshape(1, 1)
        lines.extend(" ".join(_fmt(v) for v in row) for row in rows)
    lines.append("end")
    return "\n".join(lines) + "\n"


def _expect(lines: list[str], index: int, keyword: str) -> list[str]:
    if index >= len(lines):
        msg = f"model file ends before '{keyword}'"
        raise ModelFormatError(msg)
    tokens = lines[index].split()
    if not tokens or tokens[0] != keyword:
        msg = f"line {index + 1}: expected '{keyword}', got {lines[index]!r}"
        raise ModelFormatError(msg)
    return tokens[1:]


def _ints(tokens: list[str], line: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        msg = f"line {line}: expected integers, got {' '.join(tokens)!r}"
        raise ModelFormatError(msg) from exc


def parse_model(text: str, registry: ModelRegistry | None = None) -> NumpyClassifier:
    """Rebuild a classifier from the text format.

    Raises:
        ModelFormatError: If the text is not a well-formed model file.
    """
    registry = registry or default_registry
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        msg = f"not a model file: expected header {FORMAT_HEADER!r}"
        raise ModelFormatError(msg)

    kind_tokens = _expect(lines, 1, "kind")
    try:
        kind = ModelKind(kind_tokens[0] if kind_tokens else "")
    except ValueError as exc:
        msg = f"unknown model kind {' '.join(kind_tokens)!r}"
        raise ModelFormatError(msg) from exc
    shape = _ints(_expect(lines, 2, "input_shape"), 3)
    if len(shape) != 3:
        msg = f"input_shape must have 3 entries, got {shape}"
        raise ModelFormatError(msg)
    classes = _ints(_expect(lines, 3, "num_classes"), 4)
    if len(classes) != 1:
        msg = "num_classes must be a single integer"
        raise ModelFormatError(msg)
    hyper: dict[str, int] = {}
    for token in _expect(lines, 4, "hyper"):
        key, _, value = token.partition("=")
        hyper[key] = _ints([value], 5)[0]

    params: dict[str, np.ndarray] = {}
    i = 5
    while i < len(lines) and lines[i] != "end":
        header = _expect(lines, i, "param")
        if not header:
            msg = f"line {i + 1}: parameter without a name"
            raise ModelFormatError(msg)
        name, dims = header[0], _ints(header[1:], i + 1)
        count = math.prod(dims)
        values: list[float] = []
        i += 1
        while len(values) < count:
            if i >= len(lines) or lines[i].startswith(("param", "end")):
                msg = f"parameter {name} declares {count} values, found {len(values)}"
                raise ModelFormatError(msg)
            try:
                values.extend(float(t) for t in lines[i].split())
            except ValueError as exc:
                msg = f"line {i + 1}: invalid number in parameter {name}"
                raise ModelFormatError(msg) from exc
            i += 1
        if len(values) != count:
            msg = f"parameter {name} declares {count} values, found {len(values)}"
            raise ModelFormatError(msg)
        params[name] = np.array(values, dtype=np.float64).reshape(dims)
    if i >= len(lines):
        msg = "model file is missing its 'end' line"
        raise ModelFormatError(msg)

    cls = registry.model_class(kind)
    try:
        return cls((shape[0], shape[1], shape[2]), classes[0], params, hyper)
    except ValueError as exc:
        msg = f"model file does not describe a valid {kind.value} model: {exc}"
        raise ModelFormatError(msg) from exc


def save_model(model: NumpyClassifier, path: Path | str) -> None:
    """Write ``model`` to ``path``."""
    Path(path).write_text(format_model(model), encoding="utf-8")
    logger.info("Saved %s model to %s", model.kind.value, path)


def load_model(path: Path | str, registry: ModelRegistry | None = None) -> NumpyClassifier:
    """Read a model written by :func:`save_model`."""
    model = parse_model(Path(path).read_text(encoding="utf-8"), registry)
    logger.info("Loaded %s model from %s", model.kind.value, path)
    return model
