"""Tests for SGD training and the synthetic dataset generator."""

from __future__ import annotations

import numpy as np
import pytest

from sfw_core.errors import ShapeMismatchError, TrainingDivergedError, ValidationFailure
from sfw_core.models.dataset import Dataset
from sfw_models.linear import linear_softmax
from sfw_models.mlp import mlp_1hidden
from sfw_models.synthetic import synth, synth_split
from sfw_models.training import accuracy, train_sgd

# ---- Synthetic Data Tests ----


class TestSynth:
    """Tests for the two-class generator."""

    def test_deterministic(self) -> None:
        """synth(seed=7, n=10) twice gives identical datasets."""
        a, b = synth(7, 10), synth(7, 10)
        np.testing.assert_array_equal(a.images, b.images)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_seed_changes_data(self) -> None:
        """Different seeds give different images."""
        assert not np.array_equal(synth(1, 10).images, synth(2, 10).images)

    def test_balanced_and_in_range(self) -> None:
        """Labels are split evenly and pixels lie in [0, 1]."""
        data = synth(0, 50)
        assert data.image_shape == (1, 16, 16)
        assert int(data.labels.sum()) == 25
        assert data.images.min() >= 0.0
        assert data.images.max() <= 1.0

    def test_classes_differ_in_structure(self) -> None:
        """Class 0 is brighter at the center than class 1 on average."""
        data = synth(3, 200)
        center = data.images[:, 0, 6:10, 6:10].mean(axis=(1, 2))
        assert center[data.labels == 0].mean() > center[data.labels == 1].mean() + 0.05

    def test_multichannel_shape(self) -> None:
        """Every channel of a color image carries the pattern."""
        data = synth(0, 4, shape=(3, 8, 8))
        assert data.images.shape == (4, 3, 8, 8)

    def test_split(self) -> None:
        """synth_split returns disjoint train and test parts with the default sizes."""
        train, test = synth_split()
        assert (len(train), len(test)) == (400, 200)
        assert train.name == "synth-7-train"
        assert test.name == "synth-7-test"
        full = synth(7, 600)
        np.testing.assert_array_equal(test.images, full.images[400:])

    def test_negative_count(self) -> None:
        """A negative image count is rejected."""
        with pytest.raises(ValidationFailure, match="n >= 0"):
            synth(0, -1)


# ---- SGD Tests ----


class TestTrainSgd:
    """Tests for train_sgd."""

    def test_linear_fits_synthetic_data(self) -> None:
        """A linear model reaches at least 95% train accuracy in 50 epochs at lr 0.1."""
        train, test = synth_split()
        result = train_sgd(linear_softmax(train.image_shape, 2), train, epochs=50, lr=0.1, seed=0)
        assert result.train_accuracy >= 0.95
        assert accuracy(result.model, test) >= 0.9
        assert len(result.epoch_losses) == 50

    def test_zero_epochs_returns_model_unchanged(self) -> None:
        """Zero epochs leave the model untouched."""
        data = synth(0, 20)
        model = mlp_1hidden(data.image_shape, 2, hidden=4, seed=0)
        result = train_sgd(model, data, epochs=0, lr=0.1, seed=0)
        assert result.model is model
        assert result.epoch_losses == []

    def test_deterministic(self) -> None:
        """Equal seeds give bit-identical parameters."""
        data = synth(1, 64)
        runs = [
            train_sgd(mlp_1hidden(data.image_shape, 2, hidden=4, seed=3), data, 3, 0.05, seed=11)
            for _ in range(2)
        ]
        for name, value in runs[0].model.params.items():
            np.testing.assert_array_equal(value, runs[1].model.params[name])

    def test_loss_decreases(self) -> None:
        """The mean epoch loss drops over training."""
        data = synth(2, 100)
        result = train_sgd(linear_softmax(data.image_shape, 2), data, epochs=10, lr=0.05, seed=0)
        assert result.epoch_losses[-1] < result.epoch_losses[0]

    def test_divergence_raises(self) -> None:
        """Overflowing logits abort training with a diagnostic."""
        data = Dataset(name="huge", images=np.full((64, 1, 8, 8), 1e307), labels=np.zeros(64))
        with (
            np.errstate(all="ignore"),
            pytest.raises(TrainingDivergedError, match="non-finite training loss"),
        ):
            train_sgd(linear_softmax((1, 8, 8), 2), data, epochs=2, lr=0.1, seed=0)

    def test_empty_dataset(self) -> None:
        """An empty dataset is rejected."""
        data = Dataset(name="empty", images=np.zeros((0, 1, 4, 4)), labels=np.zeros(0))
        with pytest.raises(ValidationFailure, match="empty"):
            train_sgd(linear_softmax((1, 4, 4), 2), data, epochs=1, lr=0.1, seed=0)

    def test_shape_mismatch(self) -> None:
        """Images that do not fit the model are rejected."""
        with pytest.raises(ShapeMismatchError, match="shape mismatch"):
            train_sgd(linear_softmax((1, 4, 4), 2), synth(0, 4), epochs=1, lr=0.1, seed=0)
