"""Harness configuration from the environment and from ``--config`` files."""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from sfw_core.errors import ValidationFailure

logger = logging.getLogger(__name__)


class HarnessSettings(BaseSettings):
    """Harness settings read from ``SFW_*`` environment variables.

    Attributes:
        workers: Size of the per-image attack worker pool.
        seed: Global seed; per-image streams are derived from it.
        output_dir: Default directory for reports and images.
        log_level: Root logging level.
        variance_kappa: Offset kappa of the variance-adapted group weights.
        report_wall_time: Record elapsed time in report metadata. Off by
            default so that reruns write byte-identical reports.
        monotone_tolerance: Allowed increase, in percentage points, of
            attacked accuracy between consecutive sweep points.
    """

    model_config = SettingsConfigDict(
        env_prefix="SFW_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    workers: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    output_dir: Path = Path("runs")
    log_level: str = "INFO"
    variance_kappa: float = Field(default=0.1, gt=0.0)
    report_wall_time: bool = False
    monotone_tolerance: float = Field(default=2.0, ge=0.0)


@lru_cache(maxsize=1)
def get_settings() -> HarnessSettings:
    """Return cached harness settings."""
    return HarnessSettings()


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment.

    Keys are command-line option names, with or without the leading
    dashes; underscores and dashes are interchangeable.

    Raises:
        ValidationFailure: On a line without ``=``.
    """
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            msg = f"config line {number} is not key=value: {raw!r}"
            raise ValidationFailure(msg)
        values[key.strip().lstrip("-").replace("_", "-")] = value.strip()
    return values


def load_config_file(path: Path | str) -> dict[str, str]:
    """Read a ``--config`` file."""
    values = parse_config_text(Path(path).read_text(encoding="utf-8"))
    logger.debug("Loaded %d config values from %s", len(values), path)
    return values
