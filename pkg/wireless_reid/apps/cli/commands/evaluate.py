"""``eval``: score externally computed S and D matrices against a scenario."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from wireless_reid.adapters.results_writer import read_matrix_csv
from wireless_reid.apps.cli.commands.run import print_reports, write_reports
from wireless_reid.apps.cli.options import (
    add_run_config_arguments,
    build_run_config,
    load_valid_scenario,
)
from wireless_reid.core.models import summarize
from wireless_reid.services.experiment_service import (
    METHOD_EXTERNAL,
    ExperimentService,
    run_id_for,
)


def cmd_eval(args: argparse.Namespace, *, logger: Any) -> int:
    run_config = build_run_config(args)
    scenario = load_valid_scenario(run_config)
    s = read_matrix_csv(args.s) if args.s is not None else None
    d = read_matrix_csv(args.d) if args.d is not None else None

    service = ExperimentService(logger=logger)
    reports = service.evaluate_matrices(scenario, run_config, s, d, method=args.method)
    run_id = run_id_for(scenario, run_config)
    write_reports(run_config.out_dir, run_id, run_config, summarize(scenario), reports)
    print_reports(reports)
    return 0


def register_eval_command(subparsers: Any) -> None:
    """Attach the ``eval`` subcommand to the provided subparsers."""

    parser = subparsers.add_parser("eval", help="evaluate S and D matrices from CSV files")
    add_run_config_arguments(parser)
    parser.add_argument("--s", type=Path, default=None, help="affinity matrix CSV (N x N)")
    parser.add_argument("--d", type=Path, default=None, help="distance matrix CSV (N x M)")
    parser.add_argument(
        "--method", default=METHOD_EXTERNAL, help="method name written to the report"
    )
    parser.set_defaults(func=cmd_eval)
