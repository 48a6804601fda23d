"""Tests for PGM/PPM image and heatmap emission."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from attack_harness.imaging import decode_pnm, emit_heatmap, emit_image, encode_pnm, read_image
from sfw_core.errors import ValidationFailure


class TestEncodePnm:
    """Tests for the binary encoder."""

    def test_half_rounds_up(self) -> None:
        """A constant 0.5 image is written as byte 128."""
        data = encode_pnm(np.full((1, 3, 2), 0.5))
        assert data.startswith(b"P5\n2 3\n255\n")
        assert data[-6:] == bytes([128] * 6)

    def test_colour_is_interleaved(self) -> None:
        """Three channels become P6 with RGB triples per pixel."""
        x = np.zeros((3, 1, 2))
        x[0, 0, 0] = 1.0
        x[2, 0, 1] = 1.0
        data = encode_pnm(x)
        assert data.startswith(b"P6\n2 1\n255\n")
        assert data[-6:] == bytes([255, 0, 0, 0, 0, 255])

    def test_out_of_range_values_are_clipped(self) -> None:
        """Values outside [0, 1] saturate."""
        data = encode_pnm(np.array([[[-0.2, 1.7]]]))
        assert data[-2:] == bytes([0, 255])

    def test_unsupported_channel_count(self) -> None:
        """Only one or three channels can be written."""
        with pytest.raises(ValidationFailure, match="1 or 3 channels"):
            encode_pnm(np.zeros((2, 4, 4)))


class TestEmit:
    """Tests for files written to disk."""

    def test_round_trip_quantization_bound(self, tmp_path: Path) -> None:
        """Write then read stays within half a quantization step."""
        x = np.random.default_rng(0).uniform(size=(3, 5, 7))
        path = emit_image(x, tmp_path / "x.ppm")
        assert np.max(np.abs(read_image(path) - x)) <= 1.0 / 510.0 + 1e-12

    def test_zero_heatmap(self, tmp_path: Path) -> None:
        """A zero perturbation gives zero bytes and max=0."""
        path = emit_heatmap(np.zeros((1, 4, 4)), tmp_path / "h.pgm")
        image, comments = decode_pnm(path.read_bytes())
        assert comments == ["max=0"]
        assert not np.any(image)

    def test_heatmap_scale(self, tmp_path: Path) -> None:
        """|delta| is rescaled so its maximum maps to 255."""
        delta = np.zeros((1, 2, 2))
        delta[0, 0, 0] = -0.2
        delta[0, 1, 1] = 0.1
        image, comments = decode_pnm(emit_heatmap(delta, tmp_path / "h.pgm").read_bytes())
        assert comments == [f"max={0.2:.17g}"]
        assert image[0, 0, 0] == 1.0
        assert image[0, 1, 1] == pytest.approx(128 / 255)

    def test_heatmap_leaves_input_untouched(self, tmp_path: Path) -> None:
        """Emission does not modify the perturbation."""
        delta = np.random.default_rng(1).normal(size=(1, 4, 4))
        before = delta.copy()
        emit_heatmap(delta, tmp_path / "h.pgm")
        np.testing.assert_array_equal(delta, before)
