"""Experiment orchestration: accuracy under attack, sweeps and transferability.

Per-image attacks fan out to a bounded pool of worker threads. Every image
gets its own seed derived from the global seed and its index, and results
are sorted by index before aggregation, so reports do not depend on the
pool size or on scheduling order.
"""

from __future__ import annotations

import asyncio
import enum
import logging
from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sfw_attacks.measure import clamp_box, quantized_nonzero
from sfw_attacks.registry import AttackRegistry, default_registry, loss_spec_for
from sfw_attacks.seeding import derive_seed
from sfw_core.errors import ValidationFailure, ZeroMatrixError
from sfw_core.linalg import top_singular_triplet
from sfw_core.models.attack import AttackConfig, AttackResult
from sfw_core.models.balls import DistortionBall, Matricization, with_radius
from sfw_core.models.loss import LossSpec
from sfw_core.models.report import MetricsRow, PerturbationStats
from sfw_core.tensor import FloatArray, dematricize, image_shape, matricize

if TYPE_CHECKING:
    from sfw_core.interfaces.gradient_model import GradientModel
    from sfw_core.models.dataset import Dataset

logger = logging.getLogger(__name__)

#: Adapts the configured ball to one image (for example variance weights).
BallAdapter = Callable[[FloatArray, DistortionBall], DistortionBall]


class SweepAxis(enum.StrEnum):
    """Hyperparameter varied by a sweep."""

    EPS = "eps"
    STEPS = "steps"


class MonotoneViolation(BaseModel):
    """A sweep point whose attacked accuracy rose above the tolerance."""

    model_config = ConfigDict(frozen=True)

    index: int
    value: float
    previous_accuracy: float
    accuracy: float


class SweepResult(BaseModel):
    """One metrics row per sweep value plus monotonicity diagnostics.

    Attributes:
        axis: Swept hyperparameter.
        values: Swept values, in increasing order.
        rows: Metrics row for each value.
        tolerance: Allowed increase in percentage points.
        violations: Points whose attacked accuracy exceeded the previous
            point's by more than ``tolerance``.
    """

    model_config = ConfigDict(frozen=True)

    axis: SweepAxis
    values: list[float]
    rows: list[MetricsRow]
    tolerance: float
    violations: list[MonotoneViolation] = Field(default_factory=list)

    @property
    def monotone(self) -> bool:
        """True if attacked accuracy never rose beyond the tolerance."""
        return not self.violations


class TransferMatrix(BaseModel):
    """Fooling rates of adversarial examples across models.

    ``rates[i][j]`` is the percentage of images whose adversarial example,
    crafted on model ``i``, fools model ``j``.
    """

    model_config = ConfigDict(frozen=True)

    model_ids: list[str]
    rates: list[list[float]]


class CensusResult(BaseModel):
    """Distribution of 8-bit modified entries under rank-one perturbations.

    Attributes:
        eps: Nuclear radius of the rank-one perturbation.
        counts: Modified-entry count per image, in dataset order.
        histogram: Sorted ``(count, number of images)`` pairs.
    """

    model_config = ConfigDict(frozen=True)

    eps: float
    counts: list[int]
    histogram: list[tuple[int, int]]


async def run_attacks(
    model: GradientModel,
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    *,
    workers: int = 1,
    seed: int = 0,
    registry: AttackRegistry | None = None,
    ball_for: BallAdapter | None = None,
) -> list[AttackResult]:
    """Attack every image of ``dataset`` with at most ``workers`` concurrent threads.

    Args:
        model: Attacked model.
        dataset: Images and true labels.
        attack_name: Name in ``registry``.
        cfg: Shared configuration; ``seed`` is replaced per image.
        workers: Bound on concurrently running attacks.
        seed: Global seed of the run.
        registry: Attack registry (the built-in one by default).
        ball_for: Optional per-image ball adaptation.

    Returns:
        One result per image, in dataset order.

    Raises:
        KeyError: If ``attack_name`` is not registered.
        ValidationFailure: If ``workers < 1``.
    """
    if workers < 1:
        msg = f"workers must be at least 1, got {workers}"
        raise ValidationFailure(msg)
    attack = (registry or default_registry).get(attack_name)
    limit = asyncio.Semaphore(workers)

    async def attack_one(index: int) -> tuple[int, AttackResult]:
        x = dataset.images[index]
        update: dict[str, object] = {"seed": derive_seed(seed, index)}
        if ball_for is not None:
            update["ball"] = ball_for(x, cfg.ball)
        image_cfg = cfg.model_copy(update=update)
        spec = loss_spec_for(image_cfg, int(dataset.labels[index]))
        async with limit:
            result = await asyncio.to_thread(attack, model, x, spec, image_cfg)
        return index, result

    indexed = await asyncio.gather(*(attack_one(i) for i in range(len(dataset))))
    indexed.sort(key=lambda pair: pair[0])
    logger.info(
        "Attacked %d images of %s with %s (workers=%d)",
        len(indexed),
        dataset.name,
        attack_name,
        workers,
    )
    return [result for _, result in indexed]


def attack_dataset(
    model: GradientModel,
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    *,
    workers: int = 1,
    seed: int = 0,
    registry: AttackRegistry | None = None,
    ball_for: BallAdapter | None = None,
) -> list[AttackResult]:
    """Blocking wrapper around :func:`run_attacks`."""
    return asyncio.run(
        run_attacks(
            model,
            dataset,
            attack_name,
            cfg,
            workers=workers,
            seed=seed,
            registry=registry,
            ball_for=ball_for,
        )
    )


def _percent(count: int, total: int) -> float:
    return 100.0 * count / total if total else 0.0


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(values)) if len(values) else 0.0


def summarize(
    model: GradientModel,
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    results: Sequence[AttackResult],
) -> MetricsRow:
    """Aggregate per-image results into a metrics row.

    An image counts as correct under attack only if it is classified
    correctly both clean and after the attack, so that attacked-correct
    images and successes add up to the clean-correct images.
    """
    n = len(results)
    if n != len(dataset):
        msg = f"{n} results for {len(dataset)} images"
        raise ValidationFailure(msg)
    clean_correct = attacked_correct = successes_on_correct = successes = 0
    for x, label, result in zip(dataset.images, dataset.labels, results, strict=True):
        correct = model.predict(x) == int(label)
        clean_correct += correct
        attacked_correct += correct and result.predicted == int(label)
        successes_on_correct += correct and result.success
        successes += result.success
    successful = [r for r in results if r.success]
    return MetricsRow(
        attack=attack_name,
        ball=cfg.ball.describe(),
        eps=cfg.ball.radius,
        steps=cfg.steps,
        clean_accuracy=_percent(clean_correct, n),
        attacked_accuracy=_percent(attacked_correct, n),
        success_rate=_percent(successes_on_correct, clean_correct),
        mean_l2=_mean([r.l2 for r in results]),
        mean_nuclear=_mean([r.nuclear for r in results]),
        mean_linf=_mean([r.linf for r in results]),
        mean_nonzero_pixels=_mean([r.nonzero_pixels for r in results]),
        success_rate_all=_percent(successes, n),
        successful_mean_l2=_mean([r.l2 for r in successful]),
        successful_mean_nuclear=_mean([r.nuclear for r in successful]),
        successful_mean_linf=_mean([r.linf for r in successful]),
        successful_mean_nonzero_pixels=_mean([r.nonzero_pixels for r in successful]),
        n_images=n,
    )


def accuracy_under_attack(
    model: GradientModel,
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    *,
    workers: int = 1,
    seed: int = 0,
    registry: AttackRegistry | None = None,
    ball_for: BallAdapter | None = None,
) -> tuple[MetricsRow, list[AttackResult]]:
    """Attack every image and summarize the outcome as one metrics row.

    Raises:
        ValidationFailure: If the dataset is empty.
    """
    if len(dataset) == 0:
        msg = f"dataset {dataset.name} is empty"
        raise ValidationFailure(msg)
    results = attack_dataset(
        model,
        dataset,
        attack_name,
        cfg,
        workers=workers,
        seed=seed,
        registry=registry,
        ball_for=ball_for,
    )
    row = summarize(model, dataset, attack_name, cfg, results)
    logger.info(
        "%s on %s: clean %.2f%%, attacked %.2f%%, success %.2f%%",
        attack_name,
        cfg.ball.describe(),
        row.clean_accuracy,
        row.attacked_accuracy,
        row.success_rate,
    )
    return row, results


def _config_at(cfg: AttackConfig, axis: SweepAxis, value: float) -> AttackConfig:
    if axis is SweepAxis.EPS:
        return cfg.model_copy(update={"ball": with_radius(cfg.ball, value)})
    if value != int(value) or value < 1:
        msg = f"step sweep values must be positive integers, got {value}"
        raise ValidationFailure(msg)
    return cfg.model_copy(update={"steps": int(value)})


def sweep(
    model: GradientModel,
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    axis: SweepAxis | str,
    values: Sequence[float],
    *,
    tolerance: float = 2.0,
    workers: int = 1,
    seed: int = 0,
    registry: AttackRegistry | None = None,
    ball_for: BallAdapter | None = None,
) -> SweepResult:
    """Run :func:`accuracy_under_attack` for each value of ``axis``.

    Attacked accuracy is expected to be nonincreasing along either axis;
    increases larger than ``tolerance`` percentage points are recorded as
    violations and logged, not raised.

    Raises:
        ValidationFailure: If ``values`` is empty or not strictly increasing.
    """
    axis = SweepAxis(axis)
    values = [float(v) for v in values]
    if not values:
        msg = "sweep needs at least one value"
        raise ValidationFailure(msg)
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        msg = f"sweep values must be strictly increasing, got {values}"
        raise ValidationFailure(msg)

    rows: list[MetricsRow] = []
    for value in values:
        row, _ = accuracy_under_attack(
            model,
            dataset,
            attack_name,
            _config_at(cfg, axis, value),
            workers=workers,
            seed=seed,
            registry=registry,
            ball_for=ball_for,
        )
        rows.append(row)

    violations = []
    for i in range(1, len(rows)):
        previous, current = rows[i - 1].attacked_accuracy, rows[i].attacked_accuracy
        if current > previous + tolerance:
            logger.warning(
                "Attacked accuracy rose from %.2f%% to %.2f%% at %s=%g",
                previous,
                current,
                axis,
                values[i],
            )
            violations.append(
                MonotoneViolation(
                    index=i, value=values[i], previous_accuracy=previous, accuracy=current
                )
            )
    return SweepResult(
        axis=axis, values=values, rows=rows, tolerance=tolerance, violations=violations
    )


def transfer_matrix(
    models: Sequence[GradientModel],
    dataset: Dataset,
    attack_name: str,
    cfg: AttackConfig,
    *,
    model_ids: Sequence[str] | None = None,
    workers: int = 1,
    seed: int = 0,
    registry: AttackRegistry | None = None,
    ball_for: BallAdapter | None = None,
) -> TransferMatrix:
    """Fooling rate of adversarial examples crafted on each model against every model.

    Rates are over all images of ``dataset``; an example fools model ``j``
    when model ``j``'s prediction satisfies the attack's success criterion.
    ``ball_for`` adapts the ball per image as in :func:`run_attacks`.

    Raises:
        ValidationFailure: With fewer than two models or an empty dataset.
    """
    if len(models) < 2:
        msg = f"transfer_matrix needs at least 2 models, got {len(models)}"
        raise ValidationFailure(msg)
    if len(dataset) == 0:
        msg = f"dataset {dataset.name} is empty"
        raise ValidationFailure(msg)
    ids = list(model_ids) if model_ids is not None else [f"model{i}" for i in range(len(models))]
    if len(ids) != len(models):
        msg = f"{len(ids)} model ids for {len(models)} models"
        raise ValidationFailure(msg)

    specs = [loss_spec_for(cfg, int(label)) for label in dataset.labels]
    rates: list[list[float]] = []
    for i, source in enumerate(models):
        results = attack_dataset(
            source,
            dataset,
            attack_name,
            cfg,
            workers=workers,
            seed=seed,
            registry=registry,
            ball_for=ball_for,
        )
        row = []
        for target in models:
            fooled = sum(
                spec.is_success(target.predict(result.x_adv))
                for spec, result in zip(specs, results, strict=True)
            )
            row.append(_percent(fooled, len(dataset)))
        rates.append(row)
        logger.info("Transfer from %s: %s", ids[i], ", ".join(f"{r:.2f}" for r in row))

    for i, row in enumerate(rates):
        if any(rate > row[i] for j, rate in enumerate(row) if j != i):
            logger.info("Examples from %s transfer better than they attack it", ids[i])
    return TransferMatrix(model_ids=ids, rates=rates)


def perturbation_stats(results: Sequence[AttackResult]) -> PerturbationStats:
    """Means and medians of the perturbation statistics of ``results``.

    Raises:
        ValidationFailure: If ``results`` is empty.
    """
    if not results:
        msg = "perturbation_stats needs at least one result"
        raise ValidationFailure(msg)
    columns = {
        "l2": [r.l2 for r in results],
        "nuclear": [r.nuclear for r in results],
        "linf": [r.linf for r in results],
        "nonzero_pixels": [float(r.nonzero_pixels) for r in results],
    }
    fields: dict[str, float] = {}
    for name, values in columns.items():
        fields[f"mean_{name}"] = float(np.mean(values))
        fields[f"median_{name}"] = float(np.median(values))
    return PerturbationStats(count=len(results), **fields)


def rank_one_perturbation(
    model: GradientModel,
    x: FloatArray,
    spec: LossSpec,
    eps: float,
) -> FloatArray:
    """``-eps * u v^T`` from the top singular pair of the stacked loss gradient.

    This is the nuclear-ball vertex a single Frank-Wolfe step moves to. A
    zero gradient gives a zero perturbation.
    """
    _, grad = model.input_gradient(x, spec)
    shape = image_shape(x)
    (matrix,) = matricize(grad, Matricization.STACKED)
    try:
        triplet = top_singular_triplet(matrix)
    except ZeroMatrixError:
        return np.zeros(shape)
    return dematricize([-eps * np.outer(triplet.u, triplet.v)], Matricization.STACKED, shape)


def pixel_census(model: GradientModel, dataset: Dataset, eps: float) -> CensusResult:
    """Count 8-bit modified entries when each image is moved by a rank-one perturbation.

    Each image is perturbed by :func:`rank_one_perturbation`, clamped to
    [0, 1], and the difference to the clean image is quantized to 8 bits.

    Raises:
        ValidationFailure: If ``eps`` is negative or the dataset is empty.
    """
    if eps < 0.0:
        msg = f"eps must be nonnegative, got {eps}"
        raise ValidationFailure(msg)
    if len(dataset) == 0:
        msg = f"dataset {dataset.name} is empty"
        raise ValidationFailure(msg)
    counts = []
    for x, label in zip(dataset.images, dataset.labels, strict=True):
        delta = rank_one_perturbation(model, x, LossSpec.untargeted(int(label)), eps)
        counts.append(quantized_nonzero(clamp_box(x + delta) - x))
    values, frequencies = np.unique(counts, return_counts=True)
    histogram = [(int(v), int(f)) for v, f in zip(values, frequencies, strict=True)]
    logger.info("Pixel census at eps=%g: median %g modified entries", eps, np.median(counts))
    return CensusResult(eps=eps, counts=counts, histogram=histogram)
