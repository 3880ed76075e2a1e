"""JSON readers and writers for scenarios, control points, detections and trajectories."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict

from wireless_reid.core.errors import InvalidConfigError, ScenarioIOError
from wireless_reid.core.models import Scenario, TrackPoint
from wireless_reid.core.validation import ModelT, parse_model

BoxRecord = tuple[int, float, float, float, float]


class ControlPointRecord(BaseModel):
    """One surveyed point as stored on disk: pixel ``[u, v]`` and world ``[lat, lon]``."""

    model_config = ConfigDict(frozen=True)

    pixel: tuple[float, float]
    world: tuple[float, float]


class DetectionTrack(BaseModel):
    """Boxes of one tracklet as ``[millis, left, top, width, height]`` rows."""

    model_config = ConfigDict(frozen=True)

    id: str
    camera: str
    boxes: tuple[BoxRecord, ...]


class DetectionsFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    tracks: tuple[DetectionTrack, ...]


class TrajectoryRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    camera: str
    points: tuple[TrackPoint, ...]


class TrajectoriesFile(BaseModel):
    """Output of ``georef``: local-frame trajectories plus the frame's geodetic origin."""

    model_config = ConfigDict(frozen=True)

    origin: tuple[float, float]
    trajectories: tuple[TrajectoryRecord, ...]


def read_json(path: Path) -> Any:
    if not path.is_file():
        raise ScenarioIOError(path, "file does not exist")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioIOError(path, f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def read_model(path: Path, model_cls: type[ModelT]) -> ModelT:
    """Read and validate a JSON document; schema errors name the file and the field."""

    data = read_json(path)
    try:
        return parse_model(model_cls, data, module="io")
    except InvalidConfigError as exc:
        raise ScenarioIOError(path, exc.message) from exc


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def load_scenario(path: Path) -> Scenario:
    return read_model(path, Scenario)


def save_scenario(scenario: Scenario, path: Path) -> None:
    write_text(path, scenario.model_dump_json() + "\n")


def load_control_points(path: Path) -> dict[str, tuple[ControlPointRecord, ...]]:
    """Control points keyed by camera id."""

    data = read_json(path)
    if not isinstance(data, dict):
        raise ScenarioIOError(path, "expected an object keyed by camera id")
    cameras: dict[str, tuple[ControlPointRecord, ...]] = {}
    for camera, records in sorted(data.items()):
        if not isinstance(records, list):
            raise ScenarioIOError(path, f"camera {camera!r}: expected an array of points")
        try:
            cameras[camera] = tuple(
                parse_model(ControlPointRecord, record, module="io") for record in records
            )
        except InvalidConfigError as exc:
            raise ScenarioIOError(path, f"camera {camera!r}: {exc.message}") from exc
    return cameras


def load_detections(path: Path) -> DetectionsFile:
    return read_model(path, DetectionsFile)


def save_trajectories(trajectories: TrajectoriesFile, path: Path) -> None:
    write_text(path, trajectories.model_dump_json(indent=2) + "\n")
