"""Pydantic models shared across the pipeline.

Time is integer milliseconds since the scenario epoch. Trajectory points are stored as
``(millis, x, y)`` triples in a local east/north frame measured in meters, which is also
their JSON encoding.
"""

from __future__ import annotations

from collections import Counter

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict

MILLIS_PER_SECOND = 1000
VIDEO_FPS = 6

TrackPoint = tuple[int, float, float]


def video_frame_millis(frame: int) -> int:
    """Timestamp of the ``frame``-th video frame on the 6 fps grid."""

    return round(frame * MILLIS_PER_SECOND / VIDEO_FPS)


class WorldPoint(BaseModel):
    """Planar world coordinate in meters (x east, y north)."""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float


class _Trajectory(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: tuple[TrackPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def millis(self) -> NDArray[np.int64]:
        return np.array([p[0] for p in self.points], dtype=np.int64)

    def coords(self) -> NDArray[np.float64]:
        """Return an ``(L, 2)`` array of positions."""

        if not self.points:
            return np.zeros((0, 2), dtype=np.float64)
        return np.array([(p[1], p[2]) for p in self.points], dtype=np.float64)


class VisualTrajectory(_Trajectory):
    """World-coordinate path of one video sequence, sampled on the 6 fps grid."""


class WirelessTrajectory(_Trajectory):
    """Positioning fixes of one phone, sampled on whole seconds."""

    id: str
    identity: str | None = None


class VideoSequence(BaseModel):
    """One tracklet: its embedding and georeferenced trajectory."""

    model_config = ConfigDict(frozen=True)

    id: str
    camera: str
    identity: str | None = None
    embedding: tuple[float, ...]
    trajectory: VisualTrajectory


class Scenario(BaseModel):
    """Query and gallery sequences share one database, alongside the wireless signals."""

    model_config = ConfigDict(frozen=True)

    sequences: tuple[VideoSequence, ...]
    signals: tuple[WirelessTrajectory, ...]
    queries: tuple[str, ...]
    embedding_dim: int

    def sequence_index(self) -> dict[str, int]:
        return {seq.id: i for i, seq in enumerate(self.sequences)}

    def embeddings(self) -> NDArray[np.float64]:
        """Return the ``(N, d)`` embedding matrix in sequence order."""

        if not self.sequences:
            return np.zeros((0, self.embedding_dim), dtype=np.float64)
        return np.array([seq.embedding for seq in self.sequences], dtype=np.float64)


class ScenarioSummary(BaseModel):
    """Headline counts of a scenario."""

    n_sequences: int
    n_signals: int
    n_queries: int
    n_signal_queries: int
    n_identities: int
    n_cameras: int


def summarize(scenario: Scenario) -> ScenarioSummary:
    """Count sequences, signals and the two query subsets of ``scenario``."""

    index = scenario.sequence_index()
    phoned = {sig.identity for sig in scenario.signals if sig.identity is not None}
    signal_queries = sum(
        1
        for qid in scenario.queries
        if qid in index and scenario.sequences[index[qid]].identity in phoned
    )
    identities = Counter(seq.identity for seq in scenario.sequences if seq.identity is not None)
    return ScenarioSummary(
        n_sequences=len(scenario.sequences),
        n_signals=len(scenario.signals),
        n_queries=len(scenario.queries),
        n_signal_queries=signal_queries,
        n_identities=len(identities),
        n_cameras=len({seq.camera for seq in scenario.sequences}),
    )


class ControlPoint(BaseModel):
    """Surveyed image position with its world coordinate."""

    model_config = ConfigDict(frozen=True)

    pixel: tuple[float, float]
    world: WorldPoint


class PixelToWorldMap(BaseModel):
    """Planar homography from image pixels to world meters, scaled so ``h33 == 1``."""

    model_config = ConfigDict(frozen=True)

    coefficients: tuple[
        tuple[float, float, float],
        tuple[float, float, float],
        tuple[float, float, float],
    ]

    def matrix(self) -> NDArray[np.float64]:
        return np.array(self.coefficients, dtype=np.float64)

    @classmethod
    def from_matrix(cls, matrix: NDArray[np.float64]) -> PixelToWorldMap:
        rows = [tuple(float(value) for value in row) for row in matrix]
        return cls.model_validate({"coefficients": rows})


class BoundingBox(BaseModel):
    """Detection of a pedestrian in one frame."""

    model_config = ConfigDict(frozen=True)

    left: float
    top: float
    width: float
    height: float
    millis: int
