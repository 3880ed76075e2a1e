"""Recurrent context propagation between visual affinity and trajectory distance.

Each round first updates the affinity from the previous distances, then re-estimates the
distances as an affinity-weighted average over each sequence's top-K visual neighbors.
The standard variant always starts both updates from the initial matrices so that errors
do not accumulate; the ``star`` variant feeds each round's output back in and is kept for
ablation runs.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from wireless_reid.core.errors import InvalidConfigError

DEFAULT_K = 8
DEFAULT_SIGMA = 74.0
DEFAULT_ITERATIONS = 4
DEFAULT_FUSION_WEIGHT = 0.5


class RcpmVariant(str, Enum):
    STANDARD = "standard"
    STAR = "star"


class RcpmConfig(BaseModel):
    """Propagation parameters. ``sigma`` is in the units of the distance matrix."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    k: int = Field(default=DEFAULT_K, ge=1)
    sigma: float = Field(default=DEFAULT_SIGMA, gt=0)
    iterations: int = Field(default=DEFAULT_ITERATIONS, ge=0)
    fusion_weight: float = Field(default=DEFAULT_FUSION_WEIGHT, ge=0.0, le=1.0)
    variant: RcpmVariant = RcpmVariant.STANDARD


@dataclass(frozen=True)
class RcpmState:
    s: NDArray[np.float64]
    d: NDArray[np.float64]
    s0: NDArray[np.float64]
    d0: NDArray[np.float64]


def min_avg_distance(d: NDArray[np.float64], i: int, j: int) -> float:
    """Smallest averaged distance of sequences ``i`` and ``j`` to a common signal."""

    if d.shape[1] == 0:
        return float(np.inf)
    return float(np.min((d[i] + d[j]) / 2.0))


def pairwise_min_avg_distance(d: NDArray[np.float64]) -> NDArray[np.float64]:
    """``min_avg_distance`` for every pair, shape ``(N, N)``; inf is absorbing."""

    n, m = d.shape
    if m == 0:
        return np.full((n, n), np.inf)
    result = np.empty((n, n))
    for i in range(n):
        result[i] = np.min((d[i][None, :] + d) / 2.0, axis=1)
    return result


def affinity_update(state: RcpmState, config: RcpmConfig) -> NDArray[np.float64]:
    """Blend the affinity with trajectory evidence wherever the pair is close enough."""

    base = state.s0 if config.variant is RcpmVariant.STANDARD else state.s
    d_hat = pairwise_min_avg_distance(state.d)
    update = d_hat <= config.sigma
    np.fill_diagonal(update, False)

    weight = config.fusion_weight
    gated = np.where(update, d_hat, config.sigma)
    fused = base * weight + (1.0 - gated / config.sigma) * (1.0 - weight)
    return np.asarray(np.where(update, fused, base), dtype=np.float64)


def top_k_neighbors(s: NDArray[np.float64], i: int, k: int) -> NDArray[np.intp]:
    """Row ``i`` itself followed by its ``k - 1`` highest-affinity sequences.

    Ties keep the lower index first.
    """

    n = s.shape[0]
    if not 1 <= k <= n:
        raise InvalidConfigError("k", f"must lie in [1, {n}], got {k}", module="rcpm")
    order = np.argsort(-s[i], kind="stable")
    order = order[order != i]
    return np.concatenate(([i], order[: k - 1])).astype(np.intp)


def distance_update(state: RcpmState, config: RcpmConfig) -> NDArray[np.float64]:
    """Affinity-weighted average of neighbor distances, skipping neighbors without overlap.

    ``state.s`` must already hold this round's affinity.
    """

    source = state.d0 if config.variant is RcpmVariant.STANDARD else state.d
    result = np.empty_like(state.d0)
    for i in range(source.shape[0]):
        psi = top_k_neighbors(state.s, i, config.k)
        values = source[psi]
        finite = np.isfinite(values)
        weights = state.s[i, psi][:, None] * finite
        denominator = weights.sum(axis=0)
        numerator = (weights * np.where(finite, values, 0.0)).sum(axis=0)
        has_support = denominator > 0.0
        result[i] = np.where(
            has_support,
            numerator / np.where(has_support, denominator, 1.0),
            state.d0[i],
        )
    return result


def iterate(
    s0: NDArray[np.float64],
    d0: NDArray[np.float64],
    config: RcpmConfig,
    *,
    logger: Any | None = None,
) -> Iterator[RcpmState]:
    """Yield the state after each of the ``config.iterations`` rounds.

    Shapes are checked on the first ``next``, before any round runs.
    """

    n = s0.shape[0]
    if s0.shape != (n, n):
        raise InvalidConfigError("s0", f"affinity must be square, got {s0.shape}", module="rcpm")
    if d0.shape[0] != n:
        raise InvalidConfigError(
            "d0", f"distance rows {d0.shape[0]} != affinity rows {n}", module="rcpm"
        )
    if config.k > n:
        raise InvalidConfigError("k", f"must not exceed N={n}, got {config.k}", module="rcpm")

    if logger is not None:
        logger.info(
            "rcpm variant=%s k=%s sigma=%s iterations=%s",
            config.variant.value,
            config.k,
            config.sigma,
            config.iterations,
        )

    state = RcpmState(s=s0.copy(), d=d0.copy(), s0=s0, d0=d0)
    for t in range(1, config.iterations + 1):
        s_next = affinity_update(state, config)
        changed = int(np.count_nonzero(s_next != state.s0))
        state = replace(state, s=s_next)
        state = replace(state, d=distance_update(state, config))
        if logger is not None:
            logger.debug("rcpm iteration=%s fused_pairs=%s", t, changed)
        yield state


def run(
    s0: NDArray[np.float64],
    d0: NDArray[np.float64],
    config: RcpmConfig,
    *,
    logger: Any | None = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Run ``config.iterations`` rounds and return the final affinity and distances."""

    s, d = s0.copy(), d0.copy()
    for state in iterate(s0, d0, config, logger=logger):
        s, d = state.s, state.d
    return s, d
