from __future__ import annotations

import json
from pathlib import Path

import pytest

from wireless_reid.adapters.scenario_store import (
    load_control_points,
    load_detections,
    load_scenario,
    save_scenario,
)
from wireless_reid.core.errors import ScenarioIOError
from wireless_reid.core.models import Scenario


def test_scenario_roundtrip(small_scenario: Scenario, tmp_path: Path) -> None:
    path = tmp_path / "nested" / "scenario.json"

    save_scenario(small_scenario, path)

    assert load_scenario(path) == small_scenario  # noqa: S101


def test_missing_scenario_names_the_path(tmp_path: Path) -> None:
    path = tmp_path / "absent.json"

    with pytest.raises(ScenarioIOError) as excinfo:
        load_scenario(path)

    assert excinfo.value.path == path  # noqa: S101
    assert str(path) in str(excinfo.value)  # noqa: S101
    assert str(excinfo.value).startswith("io: ")  # noqa: S101


def test_invalid_json_is_reported(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ScenarioIOError, match="invalid JSON"):
        load_scenario(path)


def test_schema_errors_name_the_field(tmp_path: Path) -> None:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"sequences": [], "signals": [], "queries": []}), encoding="utf-8")

    with pytest.raises(ScenarioIOError, match="embedding_dim"):
        load_scenario(path)


def test_control_points_are_grouped_by_camera(tmp_path: Path) -> None:
    path = tmp_path / "cp.json"
    path.write_text(
        json.dumps(
            {
                "cam1": [{"pixel": [10, 20], "world": [47.0, 8.0]}],
                "cam0": [{"pixel": [0, 0], "world": [47.1, 8.1]}],
            }
        ),
        encoding="utf-8",
    )

    cameras = load_control_points(path)

    assert list(cameras) == ["cam0", "cam1"]  # noqa: S101
    assert cameras["cam1"][0].pixel == (10.0, 20.0)  # noqa: S101


def test_control_points_reject_bad_records(tmp_path: Path) -> None:
    path = tmp_path / "cp.json"
    path.write_text(json.dumps({"cam0": [{"pixel": [1]}]}), encoding="utf-8")

    with pytest.raises(ScenarioIOError, match="cam0"):
        load_control_points(path)


def test_detections_load(tmp_path: Path) -> None:
    path = tmp_path / "det.json"
    path.write_text(
        json.dumps(
            {"tracks": [{"id": "t0", "camera": "cam0", "boxes": [[0, 10, 20, 5, 15]]}]}
        ),
        encoding="utf-8",
    )

    detections = load_detections(path)

    assert detections.tracks[0].boxes == ((0, 10.0, 20.0, 5.0, 15.0),)  # noqa: S101
