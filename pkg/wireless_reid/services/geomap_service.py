"""Pixel-to-world georeferencing of detections and Kalman smoothing of the result."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from wireless_reid.core.errors import (
    DegenerateConfigurationError,
    InvalidConfigError,
    InvalidTrajectoryError,
    PointAtInfinityError,
)
from wireless_reid.core.models import (
    MILLIS_PER_SECOND,
    BoundingBox,
    ControlPoint,
    PixelToWorldMap,
    VisualTrajectory,
    WorldPoint,
)

EARTH_RADIUS_M = 6_371_008.8
SCALE_TOLERANCE = 1e-12
DETERMINANT_TOLERANCE = 1e-12
_RANK_TOLERANCE = 1e-10
MIN_CONTROL_POINTS = 4

DEFAULT_PROCESS_NOISE = 1.0
DEFAULT_MEASUREMENT_NOISE = 2.0
# Diffuse prior on the initial velocity; the filter starts at rest at the first fix.
_INITIAL_VELOCITY_VARIANCE = 1e6


def centroid(latlons: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Mean latitude/longitude, used as the local frame origin."""

    if not latlons:
        raise DegenerateConfigurationError("cannot take the centroid of no coordinates")
    lats, lons = zip(*latlons, strict=True)
    return (sum(lats) / len(lats), sum(lons) / len(lons))


def geodetic_to_local(lat: float, lon: float, origin: tuple[float, float]) -> WorldPoint:
    """Equirectangular projection of ``(lat, lon)`` to east/north meters about ``origin``."""

    lat0, lon0 = origin
    x = EARTH_RADIUS_M * math.radians(lon - lon0) * math.cos(math.radians(lat0))
    y = EARTH_RADIUS_M * math.radians(lat - lat0)
    return WorldPoint(x=x, y=y)


def _hartley_transform(points: NDArray[np.float64]) -> NDArray[np.float64]:
    center = points.mean(axis=0)
    mean_dist = float(np.mean(np.linalg.norm(points - center, axis=1)))
    if mean_dist < SCALE_TOLERANCE:
        raise DegenerateConfigurationError("control points coincide")
    scale = math.sqrt(2.0) / mean_dist
    return np.array(
        [
            [scale, 0.0, -scale * center[0]],
            [0.0, scale, -scale * center[1]],
            [0.0, 0.0, 1.0],
        ]
    )


def _homogenise(points: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.hstack([points, np.ones((points.shape[0], 1))])


def _dlt(src: NDArray[np.float64], dst: NDArray[np.float64]) -> NDArray[np.float64]:
    t_src = _hartley_transform(src)
    t_dst = _hartley_transform(dst)
    src_n = (t_src @ _homogenise(src).T).T
    dst_n = (t_dst @ _homogenise(dst).T).T

    rows = np.zeros((2 * src.shape[0], 9))
    for i, (point, target) in enumerate(zip(src_n, dst_n, strict=True)):
        x, y = target[0] / target[2], target[1] / target[2]
        rows[2 * i, 0:3] = point
        rows[2 * i, 6:9] = -x * point
        rows[2 * i + 1, 3:6] = point
        rows[2 * i + 1, 6:9] = -y * point

    _, singular, vt = np.linalg.svd(rows)
    if singular.size < 8 or singular[7] <= _RANK_TOLERANCE * singular[0]:
        raise DegenerateConfigurationError("control points do not determine a homography")

    h_norm = vt[-1].reshape(3, 3)
    return np.asarray(np.linalg.inv(t_dst) @ h_norm @ t_src, dtype=np.float64)


def _apply(matrix: NDArray[np.float64], pixels: NDArray[np.float64]) -> NDArray[np.float64]:
    projected = (matrix @ _homogenise(pixels).T).T
    scale = projected[:, 2]
    if np.any(np.abs(scale) < SCALE_TOLERANCE):
        raise PointAtInfinityError("pixel maps to the line at infinity")
    return projected[:, :2] / scale[:, None]


def _normalised(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    if abs(matrix[2, 2]) < SCALE_TOLERANCE:
        raise DegenerateConfigurationError("homography has a vanishing h33 coefficient")
    matrix = matrix / matrix[2, 2]
    if abs(np.linalg.det(matrix)) < DETERMINANT_TOLERANCE:
        raise DegenerateConfigurationError("homography is not invertible")
    return matrix


def estimate_map(controls: Sequence[ControlPoint], *, refine: bool = True) -> PixelToWorldMap:
    """Fit the pixel-to-world homography of one camera from surveyed control points.

    The normalized direct linear transform gives the initial estimate. With more than four
    points it is refined by least squares on the world-space residuals.
    """

    if len(controls) < MIN_CONTROL_POINTS:
        raise DegenerateConfigurationError(
            f"need at least {MIN_CONTROL_POINTS} control points, got {len(controls)}"
        )
    pixels = np.array([c.pixel for c in controls], dtype=np.float64)
    world = np.array([(c.world.x, c.world.y) for c in controls], dtype=np.float64)

    matrix = _normalised(_dlt(pixels, world))

    if refine and len(controls) > MIN_CONTROL_POINTS:

        def world_residuals(params: NDArray[np.float64]) -> NDArray[np.float64]:
            candidate = np.append(params, 1.0).reshape(3, 3)
            projected = (candidate @ _homogenise(pixels).T).T
            return (projected[:, :2] / projected[:, 2:3] - world).ravel()

        fit = least_squares(world_residuals, matrix.ravel()[:8], method="lm", xtol=1e-15)
        if fit.success:
            matrix = _normalised(np.append(fit.x, 1.0).reshape(3, 3))

    return PixelToWorldMap.from_matrix(matrix)


def residuals(mapping: PixelToWorldMap, controls: Sequence[ControlPoint]) -> NDArray[np.float64]:
    """World-space distance between each control point and its projected pixel."""

    pixels = np.array([c.pixel for c in controls], dtype=np.float64)
    world = np.array([(c.world.x, c.world.y) for c in controls], dtype=np.float64)
    return np.asarray(np.linalg.norm(_apply(mapping.matrix(), pixels) - world, axis=1))


def foot_point(box: BoundingBox) -> tuple[float, float]:
    """Bottom-center of the box: where the pedestrian's feet touch the ground."""

    return (box.left + box.width / 2.0, box.top + box.height)


def project(mapping: PixelToWorldMap, pixel: tuple[float, float]) -> WorldPoint:
    x, y = _apply(mapping.matrix(), np.array([pixel], dtype=np.float64))[0]
    return WorldPoint(x=float(x), y=float(y))


def kalman_smooth(
    raw: VisualTrajectory,
    process_noise: float = DEFAULT_PROCESS_NOISE,
    measurement_noise: float = DEFAULT_MEASUREMENT_NOISE,
) -> VisualTrajectory:
    """Constant-velocity Kalman filter over ``(x, y, vx, vy)``.

    The filter starts at the first fix with zero velocity, so the first output point is
    the first input point. Timestamps are kept as they are.
    """

    if process_noise <= 0:
        raise InvalidConfigError("process_noise", "must be > 0", module="geomap")
    if measurement_noise <= 0:
        raise InvalidConfigError("measurement_noise", "must be > 0", module="geomap")
    if len(raw) <= 1:
        return raw

    times = raw.millis().astype(np.float64) / MILLIS_PER_SECOND
    if np.any(np.diff(times) <= 0):
        raise InvalidTrajectoryError("timestamps must be strictly increasing")
    measurements = raw.coords()

    r = measurement_noise**2
    observe = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    noise_r = r * np.eye(2)
    identity = np.eye(4)

    state = np.array([measurements[0, 0], measurements[0, 1], 0.0, 0.0])
    cov = np.diag([r, r, _INITIAL_VELOCITY_VARIANCE, _INITIAL_VELOCITY_VARIANCE])
    smoothed = [state[:2].copy()]

    for k in range(1, len(times)):
        dt = times[k] - times[k - 1]
        transition = np.array(
            [
                [1.0, 0.0, dt, 0.0],
                [0.0, 1.0, 0.0, dt],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
        gain_in = np.array(
            [[0.5 * dt**2, 0.0], [0.0, 0.5 * dt**2], [dt, 0.0], [0.0, dt]]
        )
        state = transition @ state
        cov = transition @ cov @ transition.T + gain_in @ gain_in.T * process_noise**2

        innovation_cov = observe @ cov @ observe.T + noise_r
        gain = np.linalg.solve(innovation_cov, observe @ cov).T
        state = state + gain @ (measurements[k] - observe @ state)
        joseph = identity - gain @ observe
        cov = joseph @ cov @ joseph.T + gain @ noise_r @ gain.T
        smoothed.append(state[:2].copy())

    points = tuple(
        (int(millis), float(pos[0]), float(pos[1]))
        for millis, pos in zip(raw.millis(), smoothed, strict=True)
    )
    return VisualTrajectory(points=points)


def build_visual_trajectory(
    boxes: Sequence[BoundingBox],
    mapping: PixelToWorldMap,
    *,
    process_noise: float = DEFAULT_PROCESS_NOISE,
    measurement_noise: float = DEFAULT_MEASUREMENT_NOISE,
    logger: Any | None = None,
) -> VisualTrajectory:
    """Foot point -> world projection -> Kalman filter, one world point per box."""

    if not boxes:
        raise InvalidTrajectoryError("no bounding boxes to georeference")
    for previous, current in zip(boxes, boxes[1:], strict=False):
        if current.millis <= previous.millis:
            raise InvalidTrajectoryError(
                f"box timestamps must be strictly increasing (at {current.millis})"
            )

    pixels = np.array([foot_point(box) for box in boxes], dtype=np.float64)
    world = _apply(mapping.matrix(), pixels)
    raw = VisualTrajectory(
        points=tuple(
            (box.millis, float(x), float(y)) for box, (x, y) in zip(boxes, world, strict=True)
        )
    )
    if logger is not None:
        logger.debug("georeferenced %s boxes", len(boxes))
    return kalman_smooth(raw, process_noise, measurement_noise)


def georeference_tracks(
    tracks: Sequence[tuple[str, str, Sequence[BoundingBox]]],
    surveys: dict[str, Sequence[tuple[tuple[float, float], tuple[float, float]]]],
    *,
    process_noise: float = DEFAULT_PROCESS_NOISE,
    measurement_noise: float = DEFAULT_MEASUREMENT_NOISE,
    logger: Any | None = None,
) -> tuple[tuple[float, float], list[tuple[str, str, VisualTrajectory]]]:
    """Georeference ``(track id, camera, boxes)`` tracks with per-camera surveys.

    Survey points are ``(pixel, (lat, lon))`` pairs. All cameras share one local frame
    centered on the centroid of every surveyed coordinate; that origin is returned with
    the trajectories.
    """

    origin = centroid([world for points in surveys.values() for _, world in points])
    maps: dict[str, PixelToWorldMap] = {}
    for camera, points in sorted(surveys.items()):
        controls = [
            ControlPoint(pixel=pixel, world=geodetic_to_local(lat, lon, origin))
            for pixel, (lat, lon) in points
        ]
        maps[camera] = estimate_map(controls)
        if logger is not None:
            worst = float(residuals(maps[camera], controls).max())
            logger.info(
                "camera=%s control_points=%s max_residual_m=%.4f", camera, len(controls), worst
            )

    results: list[tuple[str, str, VisualTrajectory]] = []
    for track_id, camera, boxes in tracks:
        if camera not in maps:
            raise DegenerateConfigurationError(f"no control points for camera {camera!r}")
        trajectory = build_visual_trajectory(
            boxes,
            maps[camera],
            process_noise=process_noise,
            measurement_noise=measurement_noise,
            logger=logger,
        )
        results.append((track_id, camera, trajectory))
    return origin, results
