"""Feature distances between sequence embeddings and the row-normalized visual affinity."""

from __future__ import annotations

from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import cdist

from wireless_reid.core.errors import ZeroVectorError
from wireless_reid.core.models import Scenario

CONSTANT_ROW_OFF_DIAGONAL = 0.5
_ZERO_NORM = 1e-12


class FeatureMetric(str, Enum):
    """Supported embedding distance functions."""

    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


def embedding_distances(
    embeddings: NDArray[np.float64], metric: FeatureMetric = FeatureMetric.EUCLIDEAN
) -> NDArray[np.float64]:
    if metric is FeatureMetric.COSINE:
        norms = np.linalg.norm(embeddings, axis=1)
        zero = np.flatnonzero(norms < _ZERO_NORM)
        if zero.size:
            raise ZeroVectorError(f"embedding {int(zero[0])} is a zero vector")
        unit = embeddings / norms[:, None]
        distances = 1.0 - unit @ unit.T
    else:
        distances = cdist(embeddings, embeddings, metric="euclidean")
    distances = np.maximum((distances + distances.T) / 2.0, 0.0)
    np.fill_diagonal(distances, 0.0)
    return np.asarray(distances, dtype=np.float64)


def feature_distances(
    scenario: Scenario, metric: FeatureMetric = FeatureMetric.EUCLIDEAN
) -> NDArray[np.float64]:
    """Pairwise feature distance F of shape ``(N, N)``; cosine distance is 1 - cos."""

    return embedding_distances(scenario.embeddings(), FeatureMetric(metric))


def visual_affinity(f: NDArray[np.float64], *, logger: Any | None = None) -> NDArray[np.float64]:
    """Map each row of F linearly onto [0, 1]: row minimum -> 1, row maximum -> 0.

    A constant row has no spread to normalize; it becomes 1 on the diagonal and 0.5
    elsewhere.
    """

    row_min = f.min(axis=1, keepdims=True)
    row_max = f.max(axis=1, keepdims=True)
    spread = row_max - row_min
    constant = spread[:, 0] == 0.0

    safe_spread = np.where(spread == 0.0, 1.0, spread)
    affinity = 1.0 - (f - row_min) / safe_spread

    for i in np.flatnonzero(constant):
        affinity[i, :] = CONSTANT_ROW_OFF_DIAGONAL
        affinity[i, i] = 1.0
        if logger is not None:
            logger.warning("feature distance row %s is constant; using neutral affinity", i)

    return np.asarray(np.clip(affinity, 0.0, 1.0), dtype=np.float64)
