"""Ranking and retrieval metrics for person re-identification and signal matching.

Ground-truth identities are read here and nowhere else in the pipeline.
"""

from __future__ import annotations

from collections.abc import Sequence
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict

from wireless_reid.core.errors import NoRelevantItemError, UnknownQueryError
from wireless_reid.core.models import Scenario, VideoSequence

DEFAULT_MAX_RANK = 20


class Task(str, Enum):
    REID = "reid"
    SIGNAL = "signal"


class RankedList(BaseModel):
    """Gallery ordered best-first for one query, with ground-truth relevance flags."""

    model_config = ConfigDict(frozen=True)

    query_id: str
    gallery_ids: tuple[str, ...]
    relevant: tuple[bool, ...]


class MetricReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    cmc: tuple[float, ...]
    map: float
    query_ids: tuple[str, ...]
    per_query_ap: tuple[float, ...]
    gallery_fraction: float | None = None


class MethodReport(BaseModel):
    """Metrics of one method on one subtask."""

    model_config = ConfigDict(frozen=True)

    method: str
    task: Task
    report: MetricReport


def _same_identity(a: str | None, b: str | None) -> bool:
    return a is not None and a == b


def _query(scenario: Scenario, query_id: str) -> tuple[int, VideoSequence]:
    index = scenario.sequence_index()
    if query_id not in index:
        raise UnknownQueryError(query_id)
    q = index[query_id]
    return q, scenario.sequences[q]


def _reid_gallery(
    scenario: Scenario, q: int, query: VideoSequence, exclude_same_camera: bool
) -> NDArray[np.intp]:
    keep = [
        j
        for j, seq in enumerate(scenario.sequences)
        if j != q
        and not (
            exclude_same_camera
            and seq.camera == query.camera
            and _same_identity(seq.identity, query.identity)
        )
    ]
    return np.array(keep, dtype=np.intp)


def _ranked(
    scenario: Scenario, query: VideoSequence, gallery: NDArray[np.intp]
) -> RankedList:
    return RankedList(
        query_id=query.id,
        gallery_ids=tuple(scenario.sequences[j].id for j in gallery),
        relevant=tuple(
            _same_identity(scenario.sequences[j].identity, query.identity) for j in gallery
        ),
    )


def _best_first(keys: NDArray[np.float64], ids: Sequence[str]) -> NDArray[np.intp]:
    """Positions by ascending key; equal keys put the lower id first."""

    if len(ids) == 0:
        return np.zeros(0, dtype=np.intp)
    id_rank = np.unique(np.asarray(ids, dtype=str), return_inverse=True)[1].reshape(-1)
    return np.asarray(np.lexsort((id_rank, keys)), dtype=np.intp)


def _sequence_ids(scenario: Scenario, positions: NDArray[np.intp]) -> list[str]:
    return [scenario.sequences[j].id for j in positions]


def _signal_ids(scenario: Scenario) -> list[str]:
    return [signal.id for signal in scenario.signals]


def reid_rank(
    s: NDArray[np.float64],
    scenario: Scenario,
    query_id: str,
    *,
    exclude_same_camera: bool = True,
) -> RankedList:
    """Gallery sequences by descending affinity; ties put the lower id first."""

    q, query = _query(scenario, query_id)
    gallery = _reid_gallery(scenario, q, query, exclude_same_camera)
    order = _best_first(-s[q, gallery], _sequence_ids(scenario, gallery))
    return _ranked(scenario, query, gallery[order])


def signal_rank(d: NDArray[np.float64], scenario: Scenario, query_id: str) -> RankedList:
    """Signals by ascending distance, lower id first on ties; no overlap (inf) comes last."""

    q, query = _query(scenario, query_id)
    order = _best_first(d[q], _signal_ids(scenario))
    return RankedList(
        query_id=query.id,
        gallery_ids=tuple(scenario.signals[m].id for m in order),
        relevant=tuple(_same_identity(scenario.signals[m].identity, query.identity) for m in order),
    )


def guided_reid_rank(
    s: NDArray[np.float64],
    d: NDArray[np.float64],
    scenario: Scenario,
    query_id: str,
    *,
    radius: float,
    exclude_same_camera: bool = True,
) -> tuple[RankedList, float]:
    """Search cameras near the query's best-matching signal first.

    Cameras that recorded a sequence within ``radius`` of the matched signal form the
    searched part of the gallery; the remaining sequences follow, so the list stays
    complete. Returns the list and the fraction of the gallery that was searched.
    """

    q, query = _query(scenario, query_id)
    gallery = _reid_gallery(scenario, q, query, exclude_same_camera)
    if gallery.size == 0:
        return _ranked(scenario, query, gallery), 0.0

    matched = int(_best_first(d[q], _signal_ids(scenario))[0]) if d.shape[1] else -1
    if matched < 0 or not np.isfinite(d[q, matched]):
        near = np.ones(gallery.size, dtype=bool)
    else:
        cameras = {
            scenario.sequences[k].camera for k in np.flatnonzero(d[:, matched] <= radius)
        }
        near = np.array([scenario.sequences[j].camera in cameras for j in gallery])

    scores = s[q, gallery]
    first = gallery[near][_best_first(-scores[near], _sequence_ids(scenario, gallery[near]))]
    rest = gallery[~near][_best_first(-scores[~near], _sequence_ids(scenario, gallery[~near]))]
    return _ranked(scenario, query, np.concatenate([first, rest])), float(near.mean())


def _first_hit(ranked: RankedList) -> int:
    for position, hit in enumerate(ranked.relevant):
        if hit:
            return position
    raise NoRelevantItemError(ranked.query_id)


def cmc(lists: Sequence[RankedList], max_rank: int = DEFAULT_MAX_RANK) -> tuple[float, ...]:
    """Fraction of queries whose first relevant item is within rank ``r + 1``."""

    if not lists:
        return tuple(0.0 for _ in range(max_rank))
    first_hits = np.array([_first_hit(ranked) for ranked in lists])
    return tuple(float(np.mean(first_hits <= r)) for r in range(max_rank))


def average_precision(ranked: RankedList) -> float:
    hits = np.flatnonzero(np.array(ranked.relevant, dtype=bool))
    if hits.size == 0:
        raise NoRelevantItemError(ranked.query_id)
    precision = np.arange(1, hits.size + 1) / (hits + 1)
    return float(precision.mean())


def mean_ap(lists: Sequence[RankedList]) -> float:
    if not lists:
        return 0.0
    return float(np.mean([average_precision(ranked) for ranked in lists]))


def evaluate(
    lists: Sequence[RankedList],
    max_rank: int = DEFAULT_MAX_RANK,
    *,
    gallery_fraction: float | None = None,
) -> MetricReport:
    return MetricReport(
        cmc=cmc(lists, max_rank),
        map=mean_ap(lists),
        query_ids=tuple(ranked.query_id for ranked in lists),
        per_query_ap=tuple(average_precision(ranked) for ranked in lists),
        gallery_fraction=gallery_fraction,
    )


def signal_queries(scenario: Scenario) -> list[str]:
    """Queries whose identity carries a phone; only these take part in signal matching."""

    phoned = {sig.identity for sig in scenario.signals if sig.identity is not None}
    index = scenario.sequence_index()
    return [
        qid
        for qid in scenario.queries
        if qid in index and scenario.sequences[index[qid]].identity in phoned
    ]


def evaluate_reid(
    s: NDArray[np.float64],
    scenario: Scenario,
    *,
    max_rank: int = DEFAULT_MAX_RANK,
    exclude_same_camera: bool = True,
) -> MetricReport:
    lists = [
        reid_rank(s, scenario, qid, exclude_same_camera=exclude_same_camera)
        for qid in scenario.queries
    ]
    return evaluate(lists, max_rank)


def evaluate_guided_reid(
    s: NDArray[np.float64],
    d: NDArray[np.float64],
    scenario: Scenario,
    *,
    radius: float,
    max_rank: int = DEFAULT_MAX_RANK,
    exclude_same_camera: bool = True,
) -> MetricReport:
    ranked = [
        guided_reid_rank(
            s, d, scenario, qid, radius=radius, exclude_same_camera=exclude_same_camera
        )
        for qid in scenario.queries
    ]
    fraction = float(np.mean([f for _, f in ranked])) if ranked else 0.0
    return evaluate([lst for lst, _ in ranked], max_rank, gallery_fraction=fraction)


def evaluate_signal(
    d: NDArray[np.float64], scenario: Scenario, *, max_rank: int = DEFAULT_MAX_RANK
) -> MetricReport:
    lists = [signal_rank(d, scenario, qid) for qid in signal_queries(scenario)]
    return evaluate(lists, max_rank)


def sm_baseline(
    d0: NDArray[np.float64], scenario: Scenario, *, max_rank: int = DEFAULT_MAX_RANK
) -> MetricReport:
    """Signal matching by nearest raw trajectory distance, without propagation."""

    return evaluate_signal(d0, scenario, max_rank=max_rank)
