"""CSV and JSON report emission.

A metrics report is written twice with the same numbers: as CSV with one
row per :class:`MetricsRow` in :data:`METRICS_COLUMNS` order, and as JSON
``{"meta": {...}, "rows": [...]}``. Floats are written with ``repr`` in CSV
so that both files round-trip to identical values. Nothing run-dependent
(paths, timestamps) is written unless wall-time reporting is enabled, so
reruns with the same seeds produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING

from sfw_core.models.report import METRICS_COLUMNS, MetricsReport

if TYPE_CHECKING:
    from attack_harness.experiments import CensusResult, SweepResult, TransferMatrix

logger = logging.getLogger(__name__)


def _cell(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_metrics_csv(report: MetricsReport) -> str:
    """Render the report rows as CSV with a header line."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    for row in report.rows:
        values = row.model_dump()
        writer.writerow([_cell(values[column]) for column in METRICS_COLUMNS])
    return buffer.getvalue()


def format_metrics_json(report: MetricsReport) -> str:
    """Render the report as JSON with ``meta`` and ``rows`` keys."""
    return report.model_dump_json(indent=2) + "\n"


def parse_metrics_csv(text: str) -> list[dict[str, float | str]]:
    """Read a metrics CSV back; numeric cells become floats."""
    rows: list[dict[str, float | str]] = []
    for record in csv.DictReader(io.StringIO(text)):
        parsed: dict[str, float | str] = {}
        for column in METRICS_COLUMNS:
            cell = record[column]
            parsed[column] = cell if column in ("attack", "ball") else float(cell)
        rows.append(parsed)
    return rows


def write_metrics_report(report: MetricsReport, out_dir: Path | str, stem: str) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.json`` under ``out_dir``.

    Returns:
        The CSV and JSON paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    csv_path.write_text(format_metrics_csv(report), encoding="utf-8")
    json_path.write_text(format_metrics_json(report), encoding="utf-8")
    logger.info("Wrote %d report rows to %s and %s", len(report.rows), csv_path, json_path)
    return csv_path, json_path


def write_sweep_diagnostics(result: SweepResult, out_dir: Path | str, stem: str) -> Path:
    """Write the monotonicity diagnostics of a sweep as JSON."""
    path = Path(out_dir) / f"{stem}_monotone.json"
    payload = {
        "axis": str(result.axis),
        "values": result.values,
        "tolerance": result.tolerance,
        "monotone": result.monotone,
        "violations": [v.model_dump() for v in result.violations],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def format_transfer_csv(matrix: TransferMatrix) -> str:
    """Render a transfer matrix; rows are source models, columns target models."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["source", *matrix.model_ids])
    for source, rates in zip(matrix.model_ids, matrix.rates, strict=True):
        writer.writerow([source, *(repr(rate) for rate in rates)])
    return buffer.getvalue()


def write_transfer_report(matrix: TransferMatrix, out_dir: Path | str, stem: str) -> tuple[Path, Path]:
    """Write a transfer matrix as ``<stem>.csv`` and ``<stem>.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    csv_path.write_text(format_transfer_csv(matrix), encoding="utf-8")
    json_path.write_text(matrix.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %dx%d transfer matrix to %s", len(matrix.rates), len(matrix.rates), csv_path)
    return csv_path, json_path


def write_census_report(census: CensusResult, out_dir: Path | str, stem: str) -> tuple[Path, Path]:
    """Write a pixel census histogram as CSV (``modified,images``) and JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    lines = ["modified,images"] + [f"{count},{images}" for count, images in census.histogram]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    json_path.write_text(census.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote pixel census for %d images to %s", len(census.counts), csv_path)
    return csv_path, json_path
