"""CSV and JSON writers for metric reports, sweeps and matrix dumps."""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from wireless_reid.core.errors import ScenarioIOError
from wireless_reid.services.eval_service import MethodReport

METRIC_COLUMNS = ("method", "task", "metric", "rank", "value")
SWEEP_COLUMNS = ("k", "sigma", "iterations", "variant", *METRIC_COLUMNS)


def format_value(value: float) -> str:
    return f"{value:.6f}"


def metric_rows(reports: Iterable[MethodReport]) -> list[dict[str, str]]:
    """Flatten reports into ``method, task, metric, rank, value`` rows."""

    rows: list[dict[str, str]] = []
    for entry in reports:
        base = {"method": entry.method, "task": entry.task.value}
        for rank, value in enumerate(entry.report.cmc, start=1):
            rows.append({**base, "metric": "cmc", "rank": str(rank), "value": format_value(value)})
        rows.append({**base, "metric": "mAP", "rank": "", "value": format_value(entry.report.map)})
        if entry.report.gallery_fraction is not None:
            rows.append(
                {
                    **base,
                    "metric": "gallery_fraction",
                    "rank": "",
                    "value": format_value(entry.report.gallery_fraction),
                }
            )
    return rows


def write_rows_csv(
    path: Path, rows: Sequence[Mapping[str, str]], columns: Sequence[str]
) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_metrics_csv(path: Path, reports: Iterable[MethodReport]) -> None:
    write_rows_csv(path, metric_rows(reports), METRIC_COLUMNS)


def write_json(path: Path, payload: Mapping[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_matrix_csv(path: Path, matrix: NDArray[np.float64]) -> None:
    """Dump a matrix with full precision; missing overlap is written as ``inf``."""

    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt="%.17g")


def read_matrix_csv(path: Path) -> NDArray[np.float64]:
    if not path.is_file():
        raise ScenarioIOError(path, "file does not exist")
    try:
        return np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ScenarioIOError(path, f"not a numeric CSV matrix ({exc})") from exc


def report_document(
    run_id: str,
    config: Mapping[str, Any],
    summary: Mapping[str, Any],
    reports: Iterable[MethodReport],
) -> dict[str, Any]:
    """JSON report body; contains no timestamps so identical runs give identical bytes."""

    methods: list[dict[str, Any]] = []
    for entry in reports:
        method: dict[str, Any] = {
            "method": entry.method,
            "task": entry.task.value,
            "cmc": list(entry.report.cmc),
            "map": entry.report.map,
            "query_ids": list(entry.report.query_ids),
            "per_query_ap": list(entry.report.per_query_ap),
        }
        if entry.report.gallery_fraction is not None:
            method["gallery_fraction"] = entry.report.gallery_fraction
        methods.append(method)
    return {"run_id": run_id, "config": dict(config), "summary": dict(summary), "methods": methods}
