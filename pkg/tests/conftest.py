from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from wireless_reid.core.models import (  # noqa: E402
    Scenario,
    VideoSequence,
    VisualTrajectory,
    WirelessTrajectory,
    video_frame_millis,
)


class DummyLogger:
    """Records formatted log lines per level."""

    def __init__(self) -> None:
        self.records: list[tuple[str, str]] = []

    def _record(self, level: str, message: str, *args: Any) -> None:
        self.records.append((level, message % args if args else message))

    def debug(self, message: str, *args: Any, **kwargs: Any) -> None:
        self._record("debug", message, *args)

    def info(self, message: str, *args: Any, **kwargs: Any) -> None:
        self._record("info", message, *args)

    def warning(self, message: str, *args: Any, **kwargs: Any) -> None:
        self._record("warning", message, *args)

    def error(self, message: str, *args: Any, **kwargs: Any) -> None:
        self._record("error", message, *args)

    def messages(self, level: str) -> list[str]:
        return [text for lvl, text in self.records if lvl == level]


@pytest.fixture
def logger() -> DummyLogger:
    return DummyLogger()


def visual_track(start_s: int, stop_s: int, x: float, y: float = 0.0) -> VisualTrajectory:
    """Stationary 6 fps track covering ``[start_s, stop_s]`` seconds."""

    frames = range(start_s * 6, stop_s * 6 + 1)
    return VisualTrajectory(points=tuple((video_frame_millis(f), x, y) for f in frames))


def wireless_track(
    signal_id: str, identity: str | None, start_s: int, stop_s: int, x: float, y: float = 0.0
) -> WirelessTrajectory:
    return WirelessTrajectory(
        id=signal_id,
        identity=identity,
        points=tuple((s * 1000, x, y) for s in range(start_s, stop_s + 1)),
    )


def make_sequence(
    seq_id: str,
    camera: str,
    identity: str | None,
    embedding: tuple[float, ...],
    x: float,
    *,
    start_s: int = 0,
    stop_s: int = 10,
) -> VideoSequence:
    return VideoSequence(
        id=seq_id,
        camera=camera,
        identity=identity,
        embedding=embedding,
        trajectory=visual_track(start_s, stop_s, x),
    )


@pytest.fixture
def small_scenario() -> Scenario:
    """Two identities seen by two cameras each; both carry a phone."""

    return Scenario(
        sequences=(
            make_sequence("v0", "cam0", "a", (0.0, 0.0), 0.0),
            make_sequence("v1", "cam1", "a", (0.1, 0.0), 0.0, start_s=20, stop_s=30),
            make_sequence("v2", "cam0", "b", (3.0, 4.0), 50.0),
            make_sequence("v3", "cam1", "b", (3.0, 4.1), 50.0, start_s=20, stop_s=30),
        ),
        signals=(
            wireless_track("w0", "a", 0, 30, 1.0),
            wireless_track("w1", "b", 0, 30, 52.0),
        ),
        queries=("v0", "v2"),
        embedding_dim=2,
    )
