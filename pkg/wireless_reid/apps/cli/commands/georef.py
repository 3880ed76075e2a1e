"""``georef``: turn pixel detections into smoothed local-frame trajectories."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from config import config
from wireless_reid.adapters.scenario_store import (
    TrajectoriesFile,
    TrajectoryRecord,
    load_control_points,
    load_detections,
    save_trajectories,
)
from wireless_reid.apps.cli.options import add_seed_argument
from wireless_reid.core.models import BoundingBox
from wireless_reid.services import geomap_service


def cmd_georef(args: argparse.Namespace, *, logger: Any) -> int:
    surveys = {
        camera: [(record.pixel, record.world) for record in records]
        for camera, records in load_control_points(args.control_points).items()
    }
    detections = load_detections(args.detections)
    tracks = [
        (
            track.id,
            track.camera,
            [
                BoundingBox(left=left, top=top, width=width, height=height, millis=millis)
                for millis, left, top, width, height in track.boxes
            ],
        )
        for track in detections.tracks
    ]

    origin, trajectories = geomap_service.georeference_tracks(
        tracks,
        surveys,
        process_noise=args.process_noise,
        measurement_noise=args.measurement_noise,
        logger=logger,
    )
    save_trajectories(
        TrajectoriesFile(
            origin=origin,
            trajectories=tuple(
                TrajectoryRecord(id=track_id, camera=camera, points=trajectory.points)
                for track_id, camera, trajectory in trajectories
            ),
        ),
        args.out,
    )
    print(f"wrote {args.out}: trajectories={len(trajectories)} cameras={len(surveys)}")
    return 0


def register_georef_command(subparsers: Any) -> None:
    """Attach the ``georef`` subcommand to the provided subparsers."""

    parser = subparsers.add_parser("georef", help="georeference detection tracks")
    parser.add_argument("--detections", type=Path, required=True, help="detections JSON file")
    parser.add_argument(
        "--control-points", type=Path, required=True, help="control points JSON file"
    )
    parser.add_argument(
        "--out", type=Path, default=Path("trajectories.json"), help="trajectories JSON to write"
    )
    parser.add_argument(
        "--process-noise",
        type=float,
        default=config.KALMAN_PROCESS_NOISE,
        help="Kalman process noise (m/s^2)",
    )
    parser.add_argument(
        "--measurement-noise",
        type=float,
        default=config.KALMAN_MEASUREMENT_NOISE,
        help="Kalman measurement noise (m)",
    )
    add_seed_argument(parser)
    parser.set_defaults(func=cmd_georef)
