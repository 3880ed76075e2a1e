"""Seeded synthetic scenarios: pedestrians walking past cameras while carrying phones.

Every random draw comes from a single generator seeded by ``SimConfig.seed`` and consumed
in a fixed order, so the same config always yields the same scenario.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from wireless_reid.core.errors import InvalidConfigError
from wireless_reid.core.models import (
    MILLIS_PER_SECOND,
    VIDEO_FPS,
    Scenario,
    VideoSequence,
    VisualTrajectory,
    WirelessTrajectory,
    video_frame_millis,
)

_PAIR_RAMP_S = 10.0
_PAIR_WINDOW_FRACTION = (0.3, 0.6)
_CLOTHING_CHANGE_WINDOW = (0.25, 0.75)
_QUERY_STREAM = 1


class Footprint(BaseModel):
    """Axis-aligned ground area seen by one camera, in world meters."""

    model_config = ConfigDict(frozen=True)

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, positions: NDArray[np.float64]) -> NDArray[np.bool_]:
        x, y = positions[:, 0], positions[:, 1]
        inside = (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)
        return np.asarray(inside, dtype=np.bool_)


class CorruptionMode(str, Enum):
    SWAP = "swap"
    NOISE = "noise"


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_identities: int = Field(default=30, ge=1)
    n_with_phone: int = Field(default=20, ge=0)
    n_cameras: int = Field(default=4, ge=1)
    camera_footprints: tuple[Footprint, ...] | None = None
    camera_size: float = Field(default=60.0, gt=0)
    area_size: float = Field(default=400.0, gt=0)
    duration_s: int = Field(default=600, ge=1)
    walk_speed_min: float = Field(default=0.8, gt=0)
    walk_speed_max: float = Field(default=1.6, gt=0)
    dwell_max_s: float = Field(default=10.0, ge=0)
    camera_waypoint_prob: float = Field(default=0.7, ge=0.0, le=1.0)
    visual_noise_std: float = Field(default=0.5, ge=0)
    positioning_noise_std: float = Field(default=5.0, ge=0)
    positioning_bias_std: float = Field(default=5.0, ge=0)
    bias_correlation_s: float = Field(default=60.0, gt=0)
    dropout_prob: float = Field(default=0.02, ge=0.0, le=1.0)
    dropout_max_len: int = Field(default=5, ge=1)
    signal_coverage: float = Field(default=1.0, gt=0.0, le=1.0)
    coverage_session_s: float = Field(default=120.0, gt=0)
    min_sequence_s: float = Field(default=2.0, gt=0)
    embedding_dim: int = Field(default=32, ge=1)
    embedding_noise_std: float = Field(default=0.6, ge=0)
    corruption_rate: float = Field(default=0.3, ge=0.0, le=1.0)
    corruption_mode: CorruptionMode = CorruptionMode.SWAP
    corruption_strength: float = Field(default=0.6, ge=0.0, le=1.0)
    clothing_change_prob: float = Field(default=0.1, ge=0.0, le=1.0)
    pair_walking_prob: float = Field(default=0.3, ge=0.0, le=1.0)
    pair_offset_max: float = Field(default=2.0, ge=0)
    seed: int = 0

    @field_validator("n_with_phone")
    @classmethod
    def _phones_fit(cls, value: int, info: ValidationInfo) -> int:
        identities = info.data.get("n_identities")
        if identities is not None and value > identities:
            raise ValueError(f"must not exceed n_identities ({identities})")
        return value

    @field_validator("camera_footprints")
    @classmethod
    def _one_footprint_per_camera(
        cls, value: tuple[Footprint, ...] | None, info: ValidationInfo
    ) -> tuple[Footprint, ...] | None:
        cameras = info.data.get("n_cameras")
        if value is not None and cameras is not None and len(value) != cameras:
            raise ValueError(f"expected {cameras} footprints, got {len(value)}")
        return value

    @field_validator("walk_speed_max")
    @classmethod
    def _speed_range(cls, value: float, info: ValidationInfo) -> float:
        lower = info.data.get("walk_speed_min")
        if lower is not None and value < lower:
            raise ValueError(f"must be >= walk_speed_min ({lower})")
        return value


DEFAULT_PRESET = "default"
BENCHMARK_PRESET = "benchmark"

# The benchmark crowd: four 30 m cameras on a 120 m square, about a dozen sequences per
# identity, and phones that report in roughly half of their two-minute sessions.
SIM_PRESETS: dict[str, dict[str, Any]] = {
    DEFAULT_PRESET: {},
    BENCHMARK_PRESET: {
        "n_identities": 30,
        "n_with_phone": 24,
        "n_cameras": 4,
        "camera_size": 30.0,
        "area_size": 120.0,
        "duration_s": 900,
        "camera_waypoint_prob": 0.9,
        "corruption_rate": 0.3,
        "corruption_strength": 0.55,
        "pair_walking_prob": 0.3,
        "signal_coverage": 0.55,
        "coverage_session_s": 120.0,
    },
}


def preset(name: str, *, seed: int = 0, **overrides: Any) -> SimConfig:
    """A named simulator setup; ``overrides`` replace single fields."""

    if name not in SIM_PRESETS:
        choices = ", ".join(sorted(SIM_PRESETS))
        raise InvalidConfigError(
            "preset", f"unknown preset {name!r} (choose from {choices})", module="simgen"
        )
    return SimConfig.model_validate({**SIM_PRESETS[name], **overrides, "seed": seed})


def default_footprints(config: SimConfig) -> tuple[Footprint, ...]:
    """Square camera footprints spread on a grid across the area."""

    if config.camera_footprints is not None:
        return config.camera_footprints
    columns = math.ceil(math.sqrt(config.n_cameras))
    rows = math.ceil(config.n_cameras / columns)
    half = min(config.camera_size, config.area_size) / 2.0
    footprints = []
    for c in range(config.n_cameras):
        cx = config.area_size * (c % columns + 0.5) / columns
        cy = config.area_size * (c // columns + 0.5) / rows
        footprints.append(
            Footprint(
                x_min=max(cx - half, 0.0),
                y_min=max(cy - half, 0.0),
                x_max=min(cx + half, config.area_size),
                y_max=min(cy + half, config.area_size),
            )
        )
    return tuple(footprints)


@dataclass(frozen=True)
class _Walker:
    index: int
    label: str
    positions: NDArray[np.float64]
    means: tuple[NDArray[np.float64], ...]
    change_s: float | None


def _frame_times(duration_s: int) -> NDArray[np.float64]:
    frames = np.arange(duration_s * VIDEO_FPS + 1)
    return np.asarray(frames / VIDEO_FPS, dtype=np.float64)


def _waypoint(
    rng: np.random.Generator, config: SimConfig, footprints: tuple[Footprint, ...]
) -> NDArray[np.float64]:
    if rng.random() < config.camera_waypoint_prob:
        box = footprints[int(rng.integers(len(footprints)))]
        lo = np.array([max(box.x_min, 0.0), max(box.y_min, 0.0)])
        hi = np.array([min(box.x_max, config.area_size), min(box.y_max, config.area_size)])
        return np.asarray(rng.uniform(lo, hi), dtype=np.float64)
    return np.asarray(rng.uniform(0.0, config.area_size, size=2), dtype=np.float64)


def _walk(
    rng: np.random.Generator,
    config: SimConfig,
    footprints: tuple[Footprint, ...],
    times: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Piecewise-linear waypoint walk with constant speed per segment and short dwells."""

    knot_times = [0.0]
    knots = [_waypoint(rng, config, footprints)]
    while knot_times[-1] < times[-1]:
        target = _waypoint(rng, config, footprints)
        speed = rng.uniform(config.walk_speed_min, config.walk_speed_max)
        travel = float(np.linalg.norm(target - knots[-1])) / speed
        knot_times.append(knot_times[-1] + max(travel, 1e-3))
        knots.append(target)
        dwell = rng.uniform(0.0, config.dwell_max_s)
        if dwell > 0.0:
            knot_times.append(knot_times[-1] + dwell)
            knots.append(target)

    stacked = np.array(knots)
    return np.column_stack(
        [
            np.interp(times, knot_times, stacked[:, 0]),
            np.interp(times, knot_times, stacked[:, 1]),
        ]
    )


def _pair_weight(times: NDArray[np.float64], start: float, stop: float) -> NDArray[np.float64]:
    rise = np.clip((times - start) / _PAIR_RAMP_S, 0.0, 1.0)
    fall = np.clip((stop - times) / _PAIR_RAMP_S, 0.0, 1.0)
    return np.asarray(np.minimum(rise, fall), dtype=np.float64)


def _apply_pair_walking(
    rng: np.random.Generator,
    config: SimConfig,
    paths: list[NDArray[np.float64]],
    times: NDArray[np.float64],
    logger: Any | None,
) -> list[NDArray[np.float64]]:
    """Let some pedestrians join a companion for a while, walking a couple of meters apart."""

    blended = [path.copy() for path in paths]
    n = len(paths)
    duration = float(times[-1])
    for j in range(n):
        if n < 2 or rng.random() >= config.pair_walking_prob:
            continue
        partner = int(rng.integers(n - 1))
        partner += partner >= j
        length = rng.uniform(*_PAIR_WINDOW_FRACTION) * duration
        start = rng.uniform(0.0, duration - length)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(0.0, config.pair_offset_max)
        offset = radius * np.array([math.cos(angle), math.sin(angle)])

        weight = _pair_weight(times, start, start + length)[:, None]
        blended[j] = (1.0 - weight) * paths[j] + weight * (paths[partner] + offset)
        if logger is not None:
            logger.debug(
                "pair walking identity=%s partner=%s start=%.1f length=%.1f",
                j,
                partner,
                start,
                length,
            )
    return blended


def _runs(mask: NDArray[np.bool_]) -> list[tuple[int, int]]:
    """Half-open ``[start, stop)`` index ranges of consecutive ``True`` values."""

    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2], strict=True)]


def _embedding(
    rng: np.random.Generator,
    config: SimConfig,
    walker: _Walker,
    start_s: float,
    walkers: list[_Walker],
) -> NDArray[np.float64]:
    dim = config.embedding_dim
    changed = walker.change_s is not None and start_s >= walker.change_s
    mean = walker.means[1 if changed else 0]
    scale = config.embedding_noise_std / math.sqrt(dim)
    embedding = mean + rng.normal(0.0, scale, size=dim)

    if rng.random() < config.corruption_rate:
        alpha = config.corruption_strength
        if config.corruption_mode is CorruptionMode.SWAP and len(walkers) > 1:
            other = int(rng.integers(len(walkers) - 1))
            other += other >= walker.index
            intruder = walkers[other].means[0] + rng.normal(0.0, scale, size=dim)
            embedding = (1.0 - alpha) * embedding + alpha * intruder
        else:
            embedding = embedding + rng.normal(0.0, 2.0 * alpha / math.sqrt(dim), size=dim)
    return np.asarray(embedding, dtype=np.float64)


def _signal(
    rng: np.random.Generator,
    config: SimConfig,
    path: NDArray[np.float64],
    signal_id: str,
    identity: str,
) -> WirelessTrajectory:
    """1 Hz fixes: truth + slowly drifting bias + white noise, with dropout bursts.

    With ``signal_coverage`` below 1 the phone reports only during some of its
    ``coverage_session_s`` long sessions, each kept with that probability.
    """

    seconds = np.arange(config.duration_s + 1)
    truth = path[seconds * VIDEO_FPS]

    rho = math.exp(-1.0 / config.bias_correlation_s)
    innovation = config.positioning_bias_std * math.sqrt(1.0 - rho**2)
    bias = np.empty((seconds.size, 2))
    bias[0] = rng.normal(0.0, config.positioning_bias_std, size=2)
    for s in range(1, seconds.size):
        bias[s] = rho * bias[s - 1] + rng.normal(0.0, innovation, size=2)
    noise = rng.normal(0.0, config.positioning_noise_std, size=(seconds.size, 2))
    fixes = truth + bias + noise

    keep = np.ones(seconds.size, dtype=bool)
    s = 0
    while s < seconds.size:
        if rng.random() < config.dropout_prob:
            burst = int(rng.integers(1, config.dropout_max_len + 1))
            keep[s : s + burst] = False
            s += burst
        else:
            s += 1

    if config.signal_coverage < 1.0:
        session = (seconds // config.coverage_session_s).astype(np.intp)
        reporting = rng.random(int(session[-1]) + 1) < config.signal_coverage
        if not reporting.any():
            reporting[int(rng.integers(reporting.size))] = True
        keep &= reporting[session]
    if not keep.any():
        keep[0] = True

    points = tuple(
        (int(sec) * MILLIS_PER_SECOND, float(x), float(y))
        for sec, (x, y) in zip(seconds[keep], fixes[keep], strict=True)
    )
    return WirelessTrajectory(id=signal_id, identity=identity, points=points)


def make_queries(scenario: Scenario, *, seed: int = 0, min_cameras: int = 2) -> list[str]:
    """One random sequence per (identity, camera) for identities seen by enough cameras."""

    rng = np.random.default_rng([seed, _QUERY_STREAM])
    by_identity: dict[str, dict[str, list[str]]] = defaultdict(lambda: defaultdict(list))
    for seq in scenario.sequences:
        if seq.identity is not None:
            by_identity[seq.identity][seq.camera].append(seq.id)

    queries: list[str] = []
    for identity in sorted(by_identity):
        cameras = by_identity[identity]
        if len(cameras) < min_cameras:
            continue
        for camera in sorted(cameras):
            candidates = cameras[camera]
            queries.append(candidates[int(rng.integers(len(candidates)))])
    return queries


def generate(config: SimConfig, *, logger: Any | None = None) -> Scenario:
    """Build a complete scenario with ground-truth labels and a query split."""

    rng = np.random.default_rng(config.seed)
    footprints = default_footprints(config)
    times = _frame_times(config.duration_s)
    dim = config.embedding_dim

    paths = [_walk(rng, config, footprints, times) for _ in range(config.n_identities)]
    paths = _apply_pair_walking(rng, config, paths, times, logger)

    walkers: list[_Walker] = []
    for p, path in enumerate(paths):
        means = [rng.normal(0.0, 1.0, size=dim) / math.sqrt(dim)]
        change_s: float | None = None
        if rng.random() < config.clothing_change_prob:
            change_s = rng.uniform(*_CLOTHING_CHANGE_WINDOW) * config.duration_s
            means.append(rng.normal(0.0, 1.0, size=dim) / math.sqrt(dim))
        walkers.append(
            _Walker(
                index=p,
                label=f"p{p:03d}",
                positions=path,
                means=tuple(means),
                change_s=change_s,
            )
        )

    min_frames = max(1, math.ceil(config.min_sequence_s * VIDEO_FPS))
    sequences: list[VideoSequence] = []
    for walker in walkers:
        for c, footprint in enumerate(footprints):
            for start, stop in _runs(footprint.contains(walker.positions)):
                if stop - start < min_frames:
                    continue
                frames = np.arange(start, stop)
                observed = walker.positions[frames] + rng.normal(
                    0.0, config.visual_noise_std, size=(frames.size, 2)
                )
                embedding = _embedding(rng, config, walker, float(times[start]), walkers)
                sequences.append(
                    VideoSequence(
                        id=f"v{len(sequences):04d}",
                        camera=f"cam{c}",
                        identity=walker.label,
                        embedding=tuple(float(value) for value in embedding),
                        trajectory=VisualTrajectory(
                            points=tuple(
                                (video_frame_millis(int(f)), float(x), float(y))
                                for f, (x, y) in zip(frames, observed, strict=True)
                            )
                        ),
                    )
                )

    phoned = sorted(
        int(p) for p in rng.choice(config.n_identities, size=config.n_with_phone, replace=False)
    )
    signals = tuple(
        _signal(rng, config, walkers[p].positions, f"w{m:02d}", walkers[p].label)
        for m, p in enumerate(phoned)
    )

    scenario = Scenario(
        sequences=tuple(sequences), signals=signals, queries=(), embedding_dim=dim
    )
    queries = make_queries(scenario, seed=config.seed)
    if logger is not None:
        logger.info(
            "generated scenario seed=%s sequences=%s signals=%s queries=%s",
            config.seed,
            len(sequences),
            len(signals),
            len(queries),
        )
    return scenario.model_copy(update={"queries": tuple(queries)})
