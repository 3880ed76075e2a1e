"""Timestamp alignment of visual and wireless trajectories and the initial distance D0.

Only visual points recorded on whole seconds take part; a pair exists when both
trajectories hold a point at exactly the same millisecond. Missing overlap is encoded as
``numpy.inf``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from wireless_reid.core.models import (
    MILLIS_PER_SECOND,
    Scenario,
    VisualTrajectory,
    WirelessTrajectory,
)

NO_OVERLAP = np.inf


@dataclass(frozen=True)
class AlignedPairs:
    """Visual/wireless positions sharing a whole-second timestamp, in time order."""

    millis: NDArray[np.int64]
    visual: NDArray[np.float64]
    wireless: NDArray[np.float64]

    @property
    def count(self) -> int:
        return int(self.millis.size)


def _whole_seconds(
    millis: NDArray[np.int64], coords: NDArray[np.float64]
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    mask = millis % MILLIS_PER_SECOND == 0
    return millis[mask], coords[mask]


def _pairs(
    v_millis: NDArray[np.int64],
    v_coords: NDArray[np.float64],
    w_millis: NDArray[np.int64],
    w_coords: NDArray[np.float64],
) -> AlignedPairs:
    shared, v_idx, w_idx = np.intersect1d(v_millis, w_millis, return_indices=True)
    return AlignedPairs(
        millis=shared.astype(np.int64),
        visual=v_coords[v_idx],
        wireless=w_coords[w_idx],
    )


def aligned_pairs(tv: VisualTrajectory, tw: WirelessTrajectory) -> AlignedPairs:
    v_millis, v_coords = _whole_seconds(tv.millis(), tv.coords())
    return _pairs(v_millis, v_coords, tw.millis(), tw.coords())


def trajectory_distance(pairs: AlignedPairs) -> float:
    """Mean Euclidean distance over the aligned pairs; ``inf`` when there are none."""

    if pairs.count == 0:
        return float(NO_OVERLAP)
    return float(np.mean(np.linalg.norm(pairs.visual - pairs.wireless, axis=1)))


def distance_matrix(scenario: Scenario) -> NDArray[np.float64]:
    """Initial trajectory distance D0 of shape ``(N, M)``."""

    signals = [(signal.millis(), signal.coords()) for signal in scenario.signals]
    result = np.full((len(scenario.sequences), len(signals)), NO_OVERLAP)
    for i, seq in enumerate(scenario.sequences):
        v_millis, v_coords = _whole_seconds(seq.trajectory.millis(), seq.trajectory.coords())
        for m, (w_millis, w_coords) in enumerate(signals):
            result[i, m] = trajectory_distance(_pairs(v_millis, v_coords, w_millis, w_coords))
    return result
