from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from wireless_reid.adapters.results_writer import (
    METRIC_COLUMNS,
    metric_rows,
    read_matrix_csv,
    report_document,
    write_json,
    write_matrix_csv,
    write_metrics_csv,
)
from wireless_reid.core.errors import ScenarioIOError
from wireless_reid.services.eval_service import MethodReport, MetricReport, Task


def _reports() -> list[MethodReport]:
    return [
        MethodReport(
            method="RCPM",
            task=Task.REID,
            report=MetricReport(
                cmc=(0.5, 1.0), map=0.75, query_ids=("v0", "v2"), per_query_ap=(1.0, 0.5)
            ),
        ),
        MethodReport(
            method="RCPM+guided",
            task=Task.REID,
            report=MetricReport(
                cmc=(1.0, 1.0),
                map=1.0,
                query_ids=("v0",),
                per_query_ap=(1.0,),
                gallery_fraction=0.25,
            ),
        ),
    ]


def test_metric_rows_flatten_reports() -> None:
    rows = metric_rows(_reports())

    assert rows[:3] == [  # noqa: S101
        {"method": "RCPM", "task": "reid", "metric": "cmc", "rank": "1", "value": "0.500000"},
        {"method": "RCPM", "task": "reid", "metric": "cmc", "rank": "2", "value": "1.000000"},
        {"method": "RCPM", "task": "reid", "metric": "mAP", "rank": "", "value": "0.750000"},
    ]
    assert rows[-1]["metric"] == "gallery_fraction"  # noqa: S101
    assert rows[-1]["value"] == "0.250000"  # noqa: S101


def test_metrics_csv_has_fixed_header(tmp_path: Path) -> None:
    path = tmp_path / "out" / "metrics.csv"

    write_metrics_csv(path, _reports())

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(METRIC_COLUMNS)  # noqa: S101
    assert lines[1] == "RCPM,reid,cmc,1,0.500000"  # noqa: S101
    assert len(lines) == 1 + len(metric_rows(_reports()))  # noqa: S101


def test_matrix_dump_keeps_infinity(tmp_path: Path) -> None:
    path = tmp_path / "D0.csv"
    matrix = np.array([[1.0 / 3.0, np.inf], [2.5, 0.0]])

    write_matrix_csv(path, matrix)

    assert "inf" in path.read_text(encoding="utf-8")  # noqa: S101
    assert np.array_equal(read_matrix_csv(path), matrix)  # noqa: S101


def test_single_column_matrix_keeps_its_shape(tmp_path: Path) -> None:
    path = tmp_path / "D.csv"
    write_matrix_csv(path, np.array([[1.0], [2.0], [3.0]]))

    assert read_matrix_csv(path).shape == (3, 1)  # noqa: S101


def test_read_matrix_rejects_text(tmp_path: Path) -> None:
    path = tmp_path / "S.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")

    with pytest.raises(ScenarioIOError):
        read_matrix_csv(path)
    with pytest.raises(ScenarioIOError, match="does not exist"):
        read_matrix_csv(tmp_path / "missing.csv")


def test_report_document_is_stable(tmp_path: Path) -> None:
    document = report_document("abc", {"max_rank": 2}, {"n_sequences": 4}, _reports())

    assert document["run_id"] == "abc"  # noqa: S101
    assert [m["method"] for m in document["methods"]] == ["RCPM", "RCPM+guided"]  # noqa: S101
    assert "gallery_fraction" not in document["methods"][0]  # noqa: S101
    assert document["methods"][1]["gallery_fraction"] == 0.25  # noqa: S101

    first, second = tmp_path / "a.json", tmp_path / "b.json"
    write_json(first, document)
    write_json(second, document)
    assert first.read_bytes() == second.read_bytes()  # noqa: S101
    assert json.loads(first.read_text(encoding="utf-8")) == document  # noqa: S101
