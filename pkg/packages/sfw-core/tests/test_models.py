"""Tests for the shared domain models."""

from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from sfw_core.models.attack import AttackConfig
from sfw_core.models.balls import (
    GroupNuclearBall,
    LpBall,
    Matricization,
    SchattenBall,
    with_radius,
)
from sfw_core.models.dataset import Dataset
from sfw_core.models.groups import GroupPartition, PixelGroup
from sfw_core.models.loss import LossMode, LossSpec
from sfw_core.models.steps import Backtracking, Harmonic, ShortStep, parse_step_rule

# ---- PixelGroup / GroupPartition Tests ----


class TestPixelGroup:
    """Tests for the PixelGroup model."""

    def test_channels_are_sorted(self) -> None:
        """Channel indices are normalized to increasing order."""
        group = PixelGroup(channels=(2, 0), rows=(0, 2), cols=(0, 2))
        assert group.channels == (0, 2)

    def test_matrix_shape_stacks_channels(self) -> None:
        """The extracted matrix stacks one block per channel."""
        group = PixelGroup(channels=(0, 1, 2), rows=(8, 16), cols=(0, 8))
        assert group.matrix_shape == (24, 8)
        assert group.size == 192

    def test_empty_interval_raises(self) -> None:
        """A zero-height group is rejected."""
        with pytest.raises(ValidationError, match="nonempty half-open interval"):
            PixelGroup(channels=(0,), rows=(3, 3), cols=(0, 2))

    def test_duplicate_channel_raises(self) -> None:
        """Repeated channel indices are rejected."""
        with pytest.raises(ValidationError, match="distinct"):
            PixelGroup(channels=(1, 1), rows=(0, 1), cols=(0, 1))

    def test_describe_matches_spec_syntax(self) -> None:
        """describe() renders the group-spec file syntax."""
        group = PixelGroup(channels=(0, 1, 2), rows=(8, 16), cols=(0, 8))
        assert group.describe() == "channels=0,1,2 rows=8:16 cols=0:8"


class TestGroupPartition:
    """Tests for the GroupPartition model."""

    def test_default_weights_are_one(self) -> None:
        """Weights default to 1 per group."""
        partition = GroupPartition.per_channel((3, 4, 4))
        assert partition.weights == (1.0, 1.0, 1.0)

    def test_overlapping_groups_raise(self) -> None:
        """Constructing an overlapping partition fails."""
        a = PixelGroup(channels=(0,), rows=(0, 4), cols=(0, 4))
        b = PixelGroup(channels=(0,), rows=(3, 6), cols=(3, 6))
        with pytest.raises(ValidationError, match="overlap"):
            GroupPartition(groups=(a, b))

    def test_same_rectangle_different_channels_is_disjoint(self) -> None:
        """Groups on different channels never overlap."""
        a = PixelGroup(channels=(0,), rows=(0, 4), cols=(0, 4))
        b = PixelGroup(channels=(1,), rows=(0, 4), cols=(0, 4))
        assert len(GroupPartition(groups=(a, b))) == 2

    def test_nonpositive_weight_raises(self) -> None:
        """Weights must be strictly positive."""
        group = PixelGroup(channels=(0,), rows=(0, 2), cols=(0, 2))
        with pytest.raises(ValidationError, match="strictly positive"):
            GroupPartition(groups=(group,), weights=(0.0,))

    def test_weight_count_mismatch_raises(self) -> None:
        """One weight per group is required."""
        partition = GroupPartition.per_channel((2, 2, 2))
        with pytest.raises(ValidationError, match="expected 2 weights"):
            partition.with_weights([1.0])

    def test_grid_covers_every_pixel_once(self) -> None:
        """A grid partition covers the frame without gaps or overlap."""
        partition = GroupPartition.grid((3, 10, 7), 3, 2, split_channels=True)
        covered = np.zeros((3, 10, 7), dtype=int)
        for group in partition.groups:
            for ch in group.channels:
                covered[ch, group.rows[0] : group.rows[1], group.cols[0] : group.cols[1]] += 1
        assert np.all(covered == 1)
        assert len(partition) == 18

    def test_full_frame_is_single_group(self) -> None:
        """full_frame spans all channels in one group."""
        partition = GroupPartition.full_frame((3, 5, 6))
        assert partition.groups[0].matrix_shape == (15, 6)


# ---- Ball Tests ----


class TestBalls:
    """Tests for the distortion-ball models."""

    def test_lp_rejects_unsupported_order(self) -> None:
        """Only p in {1, 2, inf} is accepted."""
        with pytest.raises(ValidationError, match="p must be 1, 2 or inf"):
            LpBall(p=3.0, radius=1.0)

    def test_negative_radius_raises(self) -> None:
        """Radii must be nonnegative."""
        with pytest.raises(ValidationError, match="radius"):
            SchattenBall(q=1.0, radius=-1.0)

    def test_schatten_order_below_one_raises(self) -> None:
        """Schatten orders below 1 are not norms."""
        with pytest.raises(ValidationError, match="q must lie"):
            SchattenBall(q=0.5, radius=1.0)

    def test_describe_labels(self) -> None:
        """Report labels are stable."""
        assert LpBall(p=math.inf, radius=0.1).describe() == "linf"
        assert SchattenBall.nuclear(1.0).describe() == "nuclear"
        per_channel = SchattenBall(q=2.0, radius=1.0, matricization=Matricization.PER_CHANNEL)
        assert per_channel.describe() == "schatten-2/per-channel"
        group = GroupNuclearBall(partition=GroupPartition.per_channel((3, 2, 2)), radius=1.0)
        assert group.describe() == "groupnuclear[3]"

    def test_with_radius_copies(self) -> None:
        """with_radius changes only the radius."""
        ball = SchattenBall.nuclear(1.0, Matricization.PER_CHANNEL)
        bigger = with_radius(ball, 3.0)
        assert bigger.radius == 3.0
        assert bigger.matricization is Matricization.PER_CHANNEL
        assert ball.radius == 1.0

    def test_attack_config_parses_ball_union(self) -> None:
        """AttackConfig validates a ball from plain data via the discriminator."""
        cfg = AttackConfig.model_validate(
            {"ball": {"kind": "schatten", "q": 1.0, "radius": 2.0}, "steps": 5}
        )
        assert isinstance(cfg.ball, SchattenBall)
        assert isinstance(cfg.rule, Backtracking)


# ---- Step Rule / Loss Tests ----


class TestStepRules:
    """Tests for step-rule parsing."""

    def test_parse_short(self) -> None:
        """short:L yields a ShortStep with that constant."""
        rule = parse_step_rule("short:2.5")
        assert isinstance(rule, ShortStep)
        assert rule.lipschitz == 2.5

    def test_parse_named_rules(self) -> None:
        """backtrack and harmonic parse without arguments."""
        assert isinstance(parse_step_rule("backtrack"), Backtracking)
        assert isinstance(parse_step_rule("harmonic"), Harmonic)

    def test_parse_unknown_raises(self) -> None:
        """Unknown rules are rejected."""
        with pytest.raises(ValueError, match="unknown step rule"):
            parse_step_rule("armijo")

    def test_nonpositive_lipschitz_raises(self) -> None:
        """L must be strictly positive."""
        with pytest.raises(ValidationError):
            ShortStep(lipschitz=0.0)


class TestLossSpec:
    """Tests for LossSpec success semantics."""

    def test_untargeted_success(self) -> None:
        """Untargeted attacks succeed when the prediction leaves the label."""
        spec = LossSpec.untargeted(1)
        assert spec.is_success(0)
        assert not spec.is_success(1)

    def test_targeted_success(self) -> None:
        """Targeted attacks succeed only on the target."""
        spec = LossSpec.targeted(2)
        assert spec.mode is LossMode.TARGETED
        assert spec.is_success(2)
        assert not spec.is_success(0)

    def test_targeted_config_requires_target(self) -> None:
        """A targeted AttackConfig without a target is rejected."""
        with pytest.raises(ValidationError, match="target_label"):
            AttackConfig(ball=LpBall(p=math.inf, radius=0.1), loss_mode=LossMode.TARGETED)


# ---- Dataset Tests ----


class TestDataset:
    """Tests for the Dataset model."""

    def test_length_mismatch_raises(self) -> None:
        """Images and labels must have equal lengths."""
        with pytest.raises(ValidationError, match="count mismatch"):
            Dataset(name="bad", images=np.zeros((3, 1, 2, 2)), labels=[0, 1])

    def test_non_finite_images_raise(self) -> None:
        """NaN pixels are rejected."""
        images = np.zeros((1, 1, 2, 2))
        images[0, 0, 0, 0] = np.nan
        with pytest.raises(ValidationError, match="non-finite"):
            Dataset(name="bad", images=images, labels=[0])

    def test_subset_and_shape(self) -> None:
        """subset() selects rows and keeps the image shape."""
        data = Dataset(name="d", images=np.arange(24.0).reshape(3, 2, 2, 1), labels=[0, 1, 2])
        part = data.subset([2, 0])
        assert part.labels.tolist() == [2, 0]
        assert part.image_shape == (2, 2, 1)
        assert data.num_classes == 3
