"""Tests for accuracy tables, sweeps, transfer matrices and statistics."""

from __future__ import annotations

import numpy as np
import pytest

from attack_harness.experiments import (
    SweepAxis,
    accuracy_under_attack,
    perturbation_stats,
    pixel_census,
    rank_one_perturbation,
    run_attacks,
    summarize,
    sweep,
    transfer_matrix,
)
from attack_harness.group_spec import variance_weights
from sfw_attacks.measure import build_result
from sfw_attacks.registry import AttackRegistry, default_registry
from sfw_attacks.testing import flip_label_attack, identity_attack
from sfw_core.errors import ValidationFailure
from sfw_core.interfaces.gradient_model import GradientModel
from sfw_core.models.attack import AttackConfig, AttackResult
from sfw_core.models.balls import DistortionBall, GroupNuclearBall, SchattenBall
from sfw_core.models.dataset import Dataset
from sfw_core.models.groups import GroupPartition
from sfw_core.models.loss import LossSpec
from sfw_core.tensor import FloatArray
from sfw_models.testing import MeanIntensityModel

# ---- Helpers ----

SHAPE = (1, 4, 4)
MEANS = (0.2, 0.8, 0.3, 0.9)
LABELS = (0, 1, 1, 1)


def _dataset() -> Dataset:
    """Four flat images; the mean-intensity model gets all but the third right."""
    images = np.stack([np.full(SHAPE, m) for m in MEANS])
    return Dataset(name="flat", images=images, labels=np.array(LABELS))


def _cfg(eps: float = 0.0, **kwargs: object) -> AttackConfig:
    return AttackConfig(ball=SchattenBall.nuclear(eps), **kwargs)


def _flip_below_one(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    cfg: AttackConfig,
) -> AttackResult:
    if cfg.ball.radius < 1.0:
        return flip_label_attack(model, x, spec, cfg)
    return identity_attack(model, x, spec, cfg)


@pytest.fixture
def stubs() -> AttackRegistry:
    """Registry with the stub attacks."""
    registry = AttackRegistry()
    registry.register("identity", identity_attack)
    registry.register("flip", flip_label_attack)
    registry.register("flip_below_one", _flip_below_one)
    return registry


# ---- Worker Pool Tests ----


class TestRunAttacks:
    """Tests for the bounded per-image worker pool."""

    @pytest.mark.asyncio
    async def test_results_follow_dataset_order(self) -> None:
        """Results are returned in image order."""
        results = await run_attacks(MeanIntensityModel(), _dataset(), "fw", _cfg(2.0), workers=3)
        assert [float(np.mean(r.x_adv - r.perturbation)) for r in results] == pytest.approx(MEANS)

    @pytest.mark.asyncio
    async def test_pool_size_does_not_change_results(self) -> None:
        """Per-image seeds make random starts independent of scheduling."""
        cfg = _cfg(1.0, random_start=True, steps=3)
        one = await run_attacks(MeanIntensityModel(), _dataset(), "fw", cfg, workers=1, seed=5)
        many = await run_attacks(MeanIntensityModel(), _dataset(), "fw", cfg, workers=4, seed=5)
        for a, b in zip(one, many, strict=True):
            np.testing.assert_array_equal(a.x_adv, b.x_adv)

    @pytest.mark.asyncio
    async def test_ball_adapter_is_applied_per_image(self) -> None:
        """The adapter sees every image once."""
        seen: list[float] = []

        def adapt(x: FloatArray, ball: DistortionBall) -> DistortionBall:
            seen.append(float(np.mean(x)))
            return ball

        await run_attacks(MeanIntensityModel(), _dataset(), "fw", _cfg(0.5), ball_for=adapt)
        assert sorted(seen) == pytest.approx(sorted(MEANS))

    @pytest.mark.asyncio
    async def test_rejects_empty_pool(self) -> None:
        """At least one worker is required."""
        with pytest.raises(ValidationFailure):
            await run_attacks(MeanIntensityModel(), _dataset(), "fw", _cfg(), workers=0)

    @pytest.mark.asyncio
    async def test_unknown_attack(self) -> None:
        """Unknown attack names raise KeyError."""
        with pytest.raises(KeyError):
            await run_attacks(MeanIntensityModel(), _dataset(), "cw", _cfg())


# ---- Accuracy Tests ----


class TestAccuracyUnderAttack:
    """Tests for metrics rows."""

    def test_identity_attack_keeps_clean_accuracy(self, stubs: AttackRegistry) -> None:
        """With no perturbation, attacked accuracy equals clean accuracy."""
        row, _ = accuracy_under_attack(
            MeanIntensityModel(), _dataset(), "identity", _cfg(), registry=stubs
        )
        assert row.clean_accuracy == pytest.approx(75.0)
        assert row.attacked_accuracy == pytest.approx(75.0)
        assert row.success_rate == 0.0
        assert row.mean_l2 == 0.0
        assert row.n_images == 4

    def test_flip_label_attack_zeroes_accuracy(self, stubs: AttackRegistry) -> None:
        """An oracle that always flips the label leaves nothing correct."""
        row, _ = accuracy_under_attack(
            MeanIntensityModel(), _dataset(), "flip", _cfg(), registry=stubs
        )
        assert row.attacked_accuracy == 0.0
        assert row.success_rate == pytest.approx(100.0)
        assert row.success_rate_all == pytest.approx(100.0)

    def test_frank_wolfe_row(self) -> None:
        """A nuclear radius of 2 moves every flat image across the boundary."""
        row, results = accuracy_under_attack(MeanIntensityModel(), _dataset(), "fw", _cfg(2.0))
        assert row.attacked_accuracy == 0.0
        assert row.success_rate == pytest.approx(100.0)
        assert row.ball == "nuclear"
        assert row.eps == 2.0
        assert row.mean_nuclear == pytest.approx(2.0)
        assert row.successful_mean_nuclear == pytest.approx(2.0)
        assert all(r.nonzero_pixels == 16 for r in results)

    def test_success_rate_matches_results(self) -> None:
        """success_rate recomputed from per-image results matches the row."""
        model, data = MeanIntensityModel(), _dataset()
        row, results = accuracy_under_attack(model, data, "fw", _cfg(0.5))
        correct = [model.predict(x) == y for x, y in zip(data.images, data.labels, strict=True)]
        hits = [r.success for r, ok in zip(results, correct, strict=True) if ok]
        assert row.success_rate == pytest.approx(100.0 * sum(hits) / len(hits))
        assert row.attacked_accuracy + row.success_rate * sum(correct) / len(correct) == (
            pytest.approx(row.clean_accuracy)
        )

    def test_empty_dataset(self) -> None:
        """Accuracy needs at least one image."""
        empty = _dataset().subset([])
        with pytest.raises(ValidationFailure, match="empty"):
            accuracy_under_attack(MeanIntensityModel(), empty, "fw", _cfg())

    def test_summarize_checks_lengths(self, stubs: AttackRegistry) -> None:
        """One result per image is required."""
        data = _dataset()
        _, results = accuracy_under_attack(
            MeanIntensityModel(), data, "identity", _cfg(), registry=stubs
        )
        with pytest.raises(ValidationFailure):
            summarize(MeanIntensityModel(), data, "identity", _cfg(), results[:2])

    def test_variance_weights_adapter(self) -> None:
        """Group balls accept per-image variance weights."""
        ball = GroupNuclearBall(partition=GroupPartition.grid(SHAPE, 2, 2), radius=2.0)
        row, _ = accuracy_under_attack(
            MeanIntensityModel(),
            _dataset(),
            "fw",
            AttackConfig(ball=ball),
            ball_for=lambda x, b: b.model_copy(
                update={"partition": variance_weights(x, b.partition)}
            ),
        )
        assert row.ball == "groupnuclear[4]"
        assert row.n_images == 4


# ---- Sweep Tests ----


class TestSweep:
    """Tests for radius and step sweeps."""

    def test_radius_sweep_starts_at_clean_accuracy(self) -> None:
        """eps = 0 reproduces clean accuracy and accuracy then falls."""
        result = sweep(MeanIntensityModel(), _dataset(), "fw", _cfg(), "eps", [0.0, 0.5, 2.0])
        accuracies = [row.attacked_accuracy for row in result.rows]
        assert accuracies == pytest.approx([75.0, 75.0, 0.0])
        assert result.rows[0].clean_accuracy == pytest.approx(75.0)
        assert result.monotone
        assert [row.eps for row in result.rows] == [0.0, 0.5, 2.0]

    def test_step_sweep(self) -> None:
        """Step sweeps set the iteration count of each row."""
        result = sweep(
            MeanIntensityModel(), _dataset(), "fw", _cfg(2.0), SweepAxis.STEPS, [1, 5]
        )
        assert [row.steps for row in result.rows] == [1, 5]
        assert result.monotone

    def test_violation_is_recorded(self, stubs: AttackRegistry) -> None:
        """A rise in accuracy beyond the tolerance is reported, not raised."""
        result = sweep(
            MeanIntensityModel(),
            _dataset(),
            "flip_below_one",
            _cfg(),
            "eps",
            [0.5, 2.0],
            registry=stubs,
        )
        assert not result.monotone
        (violation,) = result.violations
        assert violation.index == 1
        assert violation.previous_accuracy == 0.0
        assert violation.accuracy == pytest.approx(75.0)

    @pytest.mark.parametrize("values", [[], [1.0, 1.0], [2.0, 1.0]])
    def test_values_must_increase(self, values: list[float]) -> None:
        """Sweep values must be nonempty and strictly increasing."""
        with pytest.raises(ValidationFailure):
            sweep(MeanIntensityModel(), _dataset(), "fw", _cfg(), "eps", values)

    def test_fractional_steps(self) -> None:
        """Step counts must be whole numbers."""
        with pytest.raises(ValidationFailure):
            sweep(MeanIntensityModel(), _dataset(), "fw", _cfg(1.0), "steps", [1.5])


# ---- Transfer Tests ----


class TestTransferMatrix:
    """Tests for fooling-rate matrices."""

    def test_duplicate_models_give_equal_rows(self) -> None:
        """The same model listed twice gives two identical rows."""
        model = MeanIntensityModel()
        matrix = transfer_matrix([model, model], _dataset(), "fw", _cfg(2.0))
        first, second = matrix.rates
        assert first == second
        assert first[0] == first[1]
        assert matrix.model_ids == ["model0", "model1"]

    def test_zero_radius_gives_clean_error(self) -> None:
        """Without perturbation each column is that model's clean error rate."""
        strict, lenient = MeanIntensityModel(), MeanIntensityModel(threshold=0.25)
        matrix = transfer_matrix([strict, lenient], _dataset(), "fw", _cfg(0.0))
        assert matrix.rates == [[25.0, 0.0], [25.0, 0.0]]

    def test_ball_adapter_reaches_every_source(self) -> None:
        """A per-image ball adapter replaces the configured ball for each source model."""
        model = MeanIntensityModel()

        def widen(x: FloatArray, ball: DistortionBall) -> DistortionBall:
            return SchattenBall.nuclear(2.0)

        adapted = transfer_matrix([model, model], _dataset(), "fw", _cfg(0.0), ball_for=widen)
        plain = transfer_matrix([model, model], _dataset(), "fw", _cfg(2.0))
        untouched = transfer_matrix([model, model], _dataset(), "fw", _cfg(0.0))
        assert adapted.rates == plain.rates
        assert adapted.rates != untouched.rates

    def test_needs_two_models(self) -> None:
        """A single model has no transfer matrix."""
        with pytest.raises(ValidationFailure, match="at least 2"):
            transfer_matrix([MeanIntensityModel()], _dataset(), "fw", _cfg())


# ---- Statistics Tests ----


class TestPerturbationStats:
    """Tests for aggregate perturbation statistics."""

    def test_zero_perturbations(self, stubs: AttackRegistry) -> None:
        """Unperturbed results give all-zero statistics."""
        _, results = accuracy_under_attack(
            MeanIntensityModel(), _dataset(), "identity", _cfg(), registry=stubs
        )
        stats = perturbation_stats(results)
        assert stats.count == 4
        assert stats.model_dump(exclude={"count"}) == dict.fromkeys(
            stats.model_dump(exclude={"count"}), 0.0
        )

    def test_rank_one_perturbation(self) -> None:
        """A single eps * u v^T perturbation has mean nuclear norm eps."""
        rng = np.random.default_rng(0)
        u, v = rng.normal(size=4), rng.normal(size=4)
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        x = np.full(SHAPE, 0.5)
        delta = 0.3 * np.outer(u, v)[None]
        result = build_result(MeanIntensityModel(), x, x + delta, LossSpec.untargeted(1))
        stats = perturbation_stats([result])
        assert stats.mean_nuclear == pytest.approx(0.3)
        assert stats.median_nuclear == pytest.approx(0.3)
        assert stats.mean_l2 == pytest.approx(0.3)

    def test_medians(self, stubs: AttackRegistry) -> None:
        """Means and medians are taken over all results."""
        _, zero = accuracy_under_attack(
            MeanIntensityModel(), _dataset(), "identity", _cfg(), registry=stubs
        )
        _, moved = accuracy_under_attack(MeanIntensityModel(), _dataset(), "fw", _cfg(2.0))
        stats = perturbation_stats([*zero[:3], moved[0]])
        assert stats.median_nuclear == 0.0
        assert stats.mean_nuclear == pytest.approx(0.5)

    def test_empty(self) -> None:
        """At least one result is required."""
        with pytest.raises(ValidationFailure):
            perturbation_stats([])


# ---- Census Tests ----


class TestPixelCensus:
    """Tests for the rank-one modified-pixel census."""

    def test_rank_one_perturbation_has_nuclear_norm_eps(self) -> None:
        """The census perturbation is the nuclear-ball vertex."""
        x = np.full(SHAPE, 0.2)
        delta = rank_one_perturbation(MeanIntensityModel(), x, LossSpec.untargeted(0), 0.8)
        assert np.linalg.svd(delta[0], compute_uv=False).sum() == pytest.approx(0.8)
        assert float(np.mean(delta)) > 0.0

    def test_counts(self) -> None:
        """Every entry moves by eps/4 on flat 4x4 images."""
        census = pixel_census(MeanIntensityModel(), _dataset(), 1.0)
        assert census.counts == [16, 16, 16, 16]
        assert census.histogram == [(16, 4)]

    def test_zero_radius(self) -> None:
        """eps = 0 modifies nothing."""
        census = pixel_census(MeanIntensityModel(), _dataset(), 0.0)
        assert census.histogram == [(0, 4)]

    def test_negative_radius(self) -> None:
        """The radius must be nonnegative."""
        with pytest.raises(ValidationFailure):
            pixel_census(MeanIntensityModel(), _dataset(), -1.0)
