"""Tests for softmax cross-entropy and the adversarial objective."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sfw_core.errors import ShapeMismatchError, ValidationFailure
from sfw_core.models.loss import LossSpec
from sfw_models.linear import linear_softmax
from sfw_models.losses import (
    adversarial_loss,
    adversarial_objective,
    batch_cross_entropy,
    cross_entropy_and_grad,
    objective_for,
    softmax,
)
from sfw_models.mlp import mlp_1hidden

# ---- Cross-Entropy Tests ----


class TestCrossEntropy:
    """Tests for cross_entropy_and_grad and softmax."""

    def test_symmetric_two_class(self) -> None:
        """Logits (0, 0) give loss ln 2 and gradient (-0.5, 0.5)."""
        loss, dlogits = cross_entropy_and_grad(np.zeros(2), 0)
        assert loss == pytest.approx(math.log(2.0), abs=1e-15)
        np.testing.assert_allclose(dlogits, [-0.5, 0.5], atol=1e-15)

    def test_saturated_margin(self) -> None:
        """A margin of 100 in favour of the label gives a near-zero loss."""
        loss, dlogits = cross_entropy_and_grad(np.array([100.0, 0.0]), 0)
        assert loss == pytest.approx(0.0, abs=1e-40)
        assert np.all(np.isfinite(dlogits))

    def test_gradient_matches_finite_differences(self) -> None:
        """dlogits agrees with central differences to 1e-6 relative."""
        rng = np.random.default_rng(3)
        logits = rng.standard_normal(5)
        _, analytic = cross_entropy_and_grad(logits, 2)
        h = 1e-6
        for i in range(5):
            e = np.zeros(5)
            e[i] = h
            up, _ = cross_entropy_and_grad(logits + e, 2)
            down, _ = cross_entropy_and_grad(logits - e, 2)
            numeric = (up - down) / (2 * h)
            assert abs(numeric - analytic[i]) <= 1e-6 * max(abs(analytic[i]), 1e-3)

    def test_softmax_is_a_distribution(self) -> None:
        """Probabilities are positive and sum to 1 even for huge logits."""
        rng = np.random.default_rng(0)
        for scale in (1.0, 1e3, 1e300):
            probs = softmax(scale * rng.standard_normal(7))
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(probs >= 0.0)
        assert np.all(softmax(rng.standard_normal(7)) > 0.0)

    def test_label_out_of_range(self) -> None:
        """A label beyond the class count is rejected."""
        with pytest.raises(ValidationFailure, match="out of range"):
            cross_entropy_and_grad(np.zeros(3), 3)

    def test_batch_loss_is_the_mean(self) -> None:
        """batch_cross_entropy averages the per-row losses and scales dlogits by 1/n."""
        rng = np.random.default_rng(1)
        logits = rng.standard_normal((4, 3))
        labels = np.array([0, 2, 1, 1])
        loss, dlogits = batch_cross_entropy(logits, labels)
        rows = [cross_entropy_and_grad(logits[i], int(labels[i])) for i in range(4)]
        assert loss == pytest.approx(np.mean([r[0] for r in rows]), rel=1e-12)
        np.testing.assert_allclose(dlogits, np.stack([r[1] for r in rows]) / 4, atol=1e-15)


# ---- Adversarial Objective Tests ----


class TestAdversarialObjective:
    """Tests for adversarial_loss and adversarial_objective."""

    def test_untargeted_is_negated_targeted(self) -> None:
        """Untargeted loss and gradient are exactly the negated true-label cross-entropy."""
        logits = np.array([1.5, -0.3, 0.2])
        t_loss, t_grad = adversarial_loss(logits, LossSpec.targeted(0))
        u_loss, u_grad = adversarial_loss(logits, LossSpec.untargeted(0))
        assert u_loss == -t_loss
        np.testing.assert_array_equal(u_grad, -t_grad)

    def test_untargeted_sign_convention(self) -> None:
        """Untargeted loss is negative with a nonzero gradient, and strongly negative once misclassified."""
        model = mlp_1hidden((1, 4, 4), 2, hidden=8, seed=0)
        params = model.params
        params["b2"] = np.array([8.0, -8.0])
        model = model.with_params(params)
        x = np.full((1, 4, 4), 0.5)
        loss, grad = adversarial_objective(model, x, LossSpec.untargeted(0))
        assert -1e-3 < loss < 0.0
        assert np.linalg.norm(grad) > 0.0
        wrong_loss, _ = adversarial_objective(model, x, LossSpec.untargeted(1))
        assert wrong_loss < -10.0

    def test_targeted_at_prediction_is_small(self) -> None:
        """Targeting the class already predicted with a wide margin gives a near-zero loss."""
        model = linear_softmax((1, 2, 2), 2)
        model = model.with_params({"W": np.zeros((2, 4)), "b": np.array([20.0, 0.0])})
        loss, _ = adversarial_objective(model, np.zeros((1, 2, 2)), LossSpec.targeted(0))
        assert loss < 1e-8

    def test_shape_mismatch(self) -> None:
        """An input of the wrong shape is rejected."""
        model = linear_softmax((1, 4, 4), 2)
        with pytest.raises(ShapeMismatchError, match="shape mismatch"):
            adversarial_objective(model, np.zeros((1, 4, 5)), LossSpec.untargeted(0))

    def test_objective_for_binds_model_and_spec(self) -> None:
        """The bound objective returns the same values as a direct call."""
        model = mlp_1hidden((1, 4, 4), 3, hidden=5, seed=2)
        spec = LossSpec.untargeted(1)
        x = np.random.default_rng(0).uniform(size=(1, 4, 4))
        loss, grad = objective_for(model, spec)(x)
        ref_loss, ref_grad = adversarial_objective(model, x, spec)
        assert loss == ref_loss
        np.testing.assert_array_equal(grad, ref_grad)
