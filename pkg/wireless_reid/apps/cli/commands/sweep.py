"""``sweep``: RCPM metrics over a parameter grid."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from config import config
from wireless_reid.adapters.results_writer import SWEEP_COLUMNS, write_rows_csv
from wireless_reid.adapters.scenario_store import read_json
from wireless_reid.apps.cli.options import (
    add_run_config_arguments,
    build_run_config,
    load_valid_scenario,
)
from wireless_reid.core.errors import ScenarioIOError
from wireless_reid.core.validation import parse_model
from wireless_reid.services.experiment_config import SweepGrid
from wireless_reid.services.experiment_service import ExperimentService
from wireless_reid.services.rcpm_service import RcpmVariant

SWEEP_FILE = "sweep.csv"


def load_grid(args: argparse.Namespace) -> SweepGrid:
    """Grid axes from ``--grid``, overridden axis by axis by the list flags."""

    data: dict[str, Any] = {
        "k": [config.RCPM_K],
        "sigma": [config.RCPM_SIGMA],
        "iterations": [config.RCPM_ITERATIONS],
        "variant": [config.RCPM_VARIANT],
    }
    if args.grid is not None:
        loaded = read_json(args.grid)
        if not isinstance(loaded, dict):
            raise ScenarioIOError(args.grid, "expected a JSON object")
        data.update(loaded)
    for flag, axis in (
        ("k_values", "k"),
        ("sigma_values", "sigma"),
        ("iteration_values", "iterations"),
        ("variant_values", "variant"),
    ):
        values = getattr(args, flag)
        if values is not None:
            data[axis] = values
    return parse_model(SweepGrid, data)


def cmd_sweep(args: argparse.Namespace, *, logger: Any) -> int:
    run_config = build_run_config(args)
    grid = load_grid(args)
    scenario = load_valid_scenario(run_config)

    service = ExperimentService(logger=logger)
    rows = service.sweep(scenario, grid, run_config, workers=args.workers)
    path = run_config.out_dir / SWEEP_FILE
    write_rows_csv(path, rows, SWEEP_COLUMNS)
    print(f"wrote {path}: rows={len(rows)}")
    return 0


def register_sweep_command(subparsers: Any) -> None:
    """Attach the ``sweep`` subcommand to the provided subparsers."""

    parser = subparsers.add_parser("sweep", help="sweep RCPM parameters")
    add_run_config_arguments(parser)
    parser.add_argument("--grid", type=Path, default=None, help="sweep grid JSON file")
    parser.add_argument("--k", dest="k_values", type=int, nargs="+", help="K values")
    parser.add_argument(
        "--sigma", dest="sigma_values", type=float, nargs="+", help="sigma values"
    )
    parser.add_argument(
        "--iters", dest="iteration_values", type=int, nargs="+", help="iteration counts"
    )
    parser.add_argument(
        "--variant",
        dest="variant_values",
        nargs="+",
        choices=[v.value for v in RcpmVariant],
        help="RCPM variants",
    )
    parser.add_argument("--workers", type=int, default=1, help="grid points run in parallel")
    parser.set_defaults(func=cmd_sweep)
