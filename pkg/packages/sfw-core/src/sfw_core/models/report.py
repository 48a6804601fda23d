"""Report rows and aggregate statistics emitted by the experiment harness."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

#: Fixed CSV column order of a metrics row.
METRICS_COLUMNS: tuple[str, ...] = (
    "attack",
    "ball",
    "eps",
    "steps",
    "clean_accuracy",
    "attacked_accuracy",
    "success_rate",
    "mean_l2",
    "mean_nuclear",
    "mean_linf",
    "mean_nonzero_pixels",
    "success_rate_all",
    "successful_mean_l2",
    "successful_mean_nuclear",
    "successful_mean_linf",
    "successful_mean_nonzero_pixels",
    "n_images",
)


class PerturbationStats(BaseModel):
    """Means and medians of perturbation statistics over attack results.

    Attributes:
        count: Number of results aggregated.
        mean_l2: Mean Euclidean norm.
        median_l2: Median Euclidean norm.
        mean_nuclear: Mean nuclear norm.
        median_nuclear: Median nuclear norm.
        mean_linf: Mean largest absolute entry.
        median_linf: Median largest absolute entry.
        mean_nonzero_pixels: Mean count of 8-bit modified entries.
        median_nonzero_pixels: Median count of 8-bit modified entries.
    """

    model_config = ConfigDict(frozen=True)

    count: int
    mean_l2: float = 0.0
    median_l2: float = 0.0
    mean_nuclear: float = 0.0
    median_nuclear: float = 0.0
    mean_linf: float = 0.0
    median_linf: float = 0.0
    mean_nonzero_pixels: float = 0.0
    median_nonzero_pixels: float = 0.0


class MetricsRow(BaseModel):
    """One accuracy-under-attack row.

    Accuracies and rates are percentages. ``success_rate`` is computed over
    images the model classifies correctly when clean; ``success_rate_all``
    over every image. ``mean_*`` average all images, ``successful_mean_*``
    only successful ones.
    """

    model_config = ConfigDict(frozen=True)

    attack: str
    ball: str
    eps: float
    steps: int
    clean_accuracy: float
    attacked_accuracy: float
    success_rate: float
    mean_l2: float
    mean_nuclear: float
    mean_linf: float
    mean_nonzero_pixels: float
    success_rate_all: float
    successful_mean_l2: float
    successful_mean_nuclear: float
    successful_mean_linf: float
    successful_mean_nonzero_pixels: float
    n_images: int


class ReportMeta(BaseModel):
    """Provenance of a report.

    Attributes:
        model_id: Identifier (usually the file name) of the attacked model.
        dataset_id: Identifier of the dataset.
        seed: Global seed of the run.
        wall_time_seconds: Elapsed time, recorded only when enabled.
    """

    model_config = ConfigDict(frozen=True)

    model_id: str
    dataset_id: str
    seed: int
    wall_time_seconds: float | None = None


class MetricsReport(BaseModel):
    """A list of metrics rows with their provenance."""

    model_config = ConfigDict(frozen=True)

    meta: ReportMeta
    rows: list[MetricsRow] = Field(default_factory=list)
