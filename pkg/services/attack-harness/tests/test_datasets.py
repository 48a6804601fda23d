"""Tests for the IDX, CSV and synthetic dataset sources."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pytest

from attack_harness.datasets import (
    encode_idx,
    format_csv,
    load_csv,
    load_idx,
    resolve_source,
)
from sfw_core.errors import BadMagicError, CountMismatchError, DatasetFormatError, TruncatedFileError
from sfw_core.models.dataset import Dataset
from sfw_models.synthetic import synth

# ---- Helpers ----

FIXTURE_IMAGES = np.array(
    [
        [[0, 255, 128], [64, 0, 1]],
        [[10, 20, 30], [40, 50, 255]],
    ],
    dtype=np.uint8,
)
FIXTURE_LABELS = np.array([3, 7], dtype=np.uint8)


def _write_fixture(tmp_path: Path, images: bytes, labels: bytes) -> tuple[Path, Path]:
    images_path = tmp_path / "images.idx3-ubyte"
    labels_path = tmp_path / "labels.idx1-ubyte"
    images_path.write_bytes(images)
    labels_path.write_bytes(labels)
    return images_path, labels_path


# ---- IDX Tests ----


class TestLoadIdx:
    """Tests for the IDX reader."""

    def test_hand_built_fixture(self, tmp_path: Path) -> None:
        """A 2-image fixture loads bit for bit, scaled to [0, 1]."""
        images = struct.pack(">IIII", 0x00000803, 2, 2, 3) + FIXTURE_IMAGES.tobytes()
        labels = struct.pack(">II", 0x00000801, 2) + FIXTURE_LABELS.tobytes()
        dataset = load_idx(*_write_fixture(tmp_path, images, labels))
        assert dataset.images.shape == (2, 1, 2, 3)
        np.testing.assert_array_equal(dataset.images[:, 0] * 255.0, FIXTURE_IMAGES)
        np.testing.assert_array_equal(dataset.labels, [3, 7])

    def test_encode_idx_matches_hand_packing(self) -> None:
        """encode_idx produces the same bytes as manual struct packing."""
        expected = struct.pack(">IIII", 0x00000803, 2, 2, 3) + FIXTURE_IMAGES.tobytes()
        assert encode_idx(FIXTURE_IMAGES) == expected

    def test_bad_magic(self, tmp_path: Path) -> None:
        """Swapped files are reported as a magic mismatch."""
        images = encode_idx(FIXTURE_IMAGES)
        labels = encode_idx(FIXTURE_LABELS)
        with pytest.raises(BadMagicError, match="magic"):
            load_idx(*_write_fixture(tmp_path, labels, images))

    def test_truncated_data(self, tmp_path: Path) -> None:
        """Missing pixel bytes are a truncation error."""
        images = encode_idx(FIXTURE_IMAGES)[:-1]
        with pytest.raises(TruncatedFileError):
            load_idx(*_write_fixture(tmp_path, images, encode_idx(FIXTURE_LABELS)))

    def test_truncated_header(self, tmp_path: Path) -> None:
        """A file shorter than its header is a truncation error."""
        with pytest.raises(TruncatedFileError):
            load_idx(*_write_fixture(tmp_path, b"\x00\x00", encode_idx(FIXTURE_LABELS)))

    def test_count_mismatch(self, tmp_path: Path) -> None:
        """Image and label counts must agree."""
        labels = encode_idx(np.array([1, 2, 3], dtype=np.uint8))
        with pytest.raises(CountMismatchError, match="count mismatch"):
            load_idx(*_write_fixture(tmp_path, encode_idx(FIXTURE_IMAGES), labels))

    def test_errors_are_distinct(self) -> None:
        """The three IDX faults are different exception types."""
        assert len({BadMagicError, TruncatedFileError, CountMismatchError}) == 3
        assert not issubclass(BadMagicError, TruncatedFileError)


# ---- CSV Tests ----


class TestLoadCsv:
    """Tests for the labelled CSV format."""

    def test_reads_written_dataset(self, tmp_path: Path) -> None:
        """format_csv output loads back to the same arrays."""
        dataset = synth(3, 4, shape=(2, 3, 3))
        path = tmp_path / "data.csv"
        path.write_text(format_csv(dataset), encoding="utf-8")
        loaded = load_csv(path)
        np.testing.assert_array_equal(loaded.images, dataset.images)
        np.testing.assert_array_equal(loaded.labels, dataset.labels)

    def test_row_count_mismatch(self, tmp_path: Path) -> None:
        """The header row count must match the data rows."""
        path = tmp_path / "data.csv"
        path.write_text("3,1,1,2\n0,0.1,0.2\n1,0.3,0.4\n", encoding="utf-8")
        with pytest.raises(CountMismatchError, match="declares 3 rows, found 2"):
            load_csv(path)

    def test_wrong_value_count(self, tmp_path: Path) -> None:
        """Each row carries exactly c*h*w values."""
        path = tmp_path / "data.csv"
        path.write_text("1,1,1,2\n0,0.1\n", encoding="utf-8")
        with pytest.raises(DatasetFormatError, match="expected 2"):
            load_csv(path)

    def test_bad_header(self, tmp_path: Path) -> None:
        """A non-numeric header is rejected."""
        path = tmp_path / "data.csv"
        path.write_text("n,c,h,w\n", encoding="utf-8")
        with pytest.raises(DatasetFormatError, match="header"):
            load_csv(path)


# ---- Source Resolution Tests ----


class TestResolveSource:
    """Tests for command-line dataset descriptions."""

    def test_synth_is_deterministic(self) -> None:
        """synth(seed=7, n=10) twice gives identical datasets."""
        first, second = synth(7, 10), synth(7, 10)
        np.testing.assert_array_equal(first.images, second.images)
        np.testing.assert_array_equal(first.labels, second.labels)

    def test_synth_splits(self) -> None:
        """The synthetic source defaults to the 200-image test split."""
        test = resolve_source("synth")
        train = resolve_source("synth:train")
        assert len(test) == 200
        assert len(train) == 400
        assert test.image_shape == (1, 16, 16)

    def test_csv_by_suffix(self, tmp_path: Path) -> None:
        """Paths ending in .csv are read as labelled CSV."""
        path = tmp_path / "tiny.csv"
        path.write_text(format_csv(synth(1, 2, shape=(1, 2, 2))), encoding="utf-8")
        assert isinstance(resolve_source(str(path)), Dataset)
        assert len(resolve_source(f"csv:{path}")) == 2

    @pytest.mark.parametrize("source", ["mnist", "synth:valid", "synth:test:x", "idx:only-one"])
    def test_unknown_sources(self, source: str) -> None:
        """Unrecognized descriptions are format errors."""
        with pytest.raises(DatasetFormatError):
            resolve_source(source)
