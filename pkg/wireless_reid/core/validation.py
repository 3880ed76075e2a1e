"""Structural checks for scenarios and config documents.

Scenario violations are reported as data, never raised.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from wireless_reid.core.errors import InvalidConfigError
from wireless_reid.core.models import (
    MILLIS_PER_SECOND,
    VIDEO_FPS,
    Scenario,
    TrackPoint,
    video_frame_millis,
)

ModelT = TypeVar("ModelT", bound=BaseModel)


def _on_video_grid(millis: int) -> bool:
    frame = round(millis * VIDEO_FPS / MILLIS_PER_SECOND)
    return video_frame_millis(frame) == millis


def _check_points(owner: str, points: Iterable[TrackPoint], *, wireless: bool) -> list[str]:
    violations: list[str] = []
    previous: int | None = None
    count = 0
    for millis, x, y in points:
        count += 1
        if millis < 0:
            violations.append(f"{owner}: negative timestamp {millis}")
        if previous is not None and millis <= previous:
            violations.append(f"{owner}: timestamps not strictly increasing at {millis}")
        previous = millis
        if not (math.isfinite(x) and math.isfinite(y)):
            violations.append(f"{owner}: non-finite coordinate at {millis}")
        if wireless and millis % MILLIS_PER_SECOND != 0:
            violations.append(f"{owner}: off-second wireless sample at {millis}")
        if not wireless and not _on_video_grid(millis):
            violations.append(f"{owner}: video sample off the 6 fps grid at {millis}")
    if count == 0:
        violations.append(f"{owner}: empty trajectory")
    return violations


def validate(scenario: Scenario) -> list[str]:
    """Return every invariant violation found in ``scenario``; empty when well formed."""

    violations: list[str] = []

    for seq_id, count in Counter(seq.id for seq in scenario.sequences).items():
        if count > 1:
            violations.append(f"duplicate sequence id {seq_id!r}")
    for sig_id, count in Counter(sig.id for sig in scenario.signals).items():
        if count > 1:
            violations.append(f"duplicate signal id {sig_id!r}")

    for seq in scenario.sequences:
        owner = f"sequence {seq.id!r}"
        if len(seq.embedding) != scenario.embedding_dim:
            violations.append(
                f"{owner}: embedding dimension {len(seq.embedding)} != {scenario.embedding_dim}"
            )
        if not all(math.isfinite(value) for value in seq.embedding):
            violations.append(f"{owner}: non-finite embedding value")
        violations.extend(_check_points(owner, seq.trajectory.points, wireless=False))

    for sig in scenario.signals:
        violations.extend(_check_points(f"signal {sig.id!r}", sig.points, wireless=True))

    signal_owners = Counter(sig.identity for sig in scenario.signals if sig.identity is not None)
    for identity, count in signal_owners.items():
        if count > 1:
            violations.append(f"identity {identity!r} owns {count} signals")

    known = {seq.id for seq in scenario.sequences}
    for qid in scenario.queries:
        if qid not in known:
            violations.append(f"query id {qid!r} does not reference a sequence")

    return violations


def parse_model(model_cls: type[ModelT], data: Any, *, module: str = "config") -> ModelT:
    """Validate ``data`` into ``model_cls``, reporting the first bad field by name."""

    try:
        return model_cls.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or model_cls.__name__
        raise InvalidConfigError(field, first["msg"], module=module) from exc
