"""``run``: the full fusion pipeline on one scenario."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from config import config
from wireless_reid.adapters.results_writer import (
    report_document,
    write_json,
    write_matrix_csv,
    write_metrics_csv,
)
from wireless_reid.adapters.run_history.tinydb_repo import TinyDbRunHistoryRepo
from wireless_reid.apps.cli.options import (
    add_rcpm_arguments,
    add_run_config_arguments,
    build_run_config,
    load_valid_scenario,
)
from wireless_reid.core.models import ScenarioSummary
from wireless_reid.services.eval_service import MethodReport
from wireless_reid.services.experiment_config import RunConfig
from wireless_reid.services.experiment_service import ExperimentResult, ExperimentService

METRICS_FILE = "metrics.csv"
REPORT_FILE = "report.json"
HISTORY_FILE = "run_history.json"


def write_reports(
    out_dir: Path,
    run_id: str,
    run_config: RunConfig,
    summary: ScenarioSummary,
    reports: Sequence[MethodReport],
) -> None:
    write_metrics_csv(out_dir / METRICS_FILE, reports)
    write_json(
        out_dir / REPORT_FILE,
        report_document(
            run_id,
            run_config.model_dump(mode="json"),
            summary.model_dump(mode="json"),
            reports,
        ),
    )


def print_reports(reports: Sequence[MethodReport]) -> None:
    for entry in reports:
        rank1 = entry.report.cmc[0] if entry.report.cmc else 0.0
        print(
            f"{entry.method:<16} {entry.task.value:<6} "
            f"rank1={rank1:.4f} mAP={entry.report.map:.4f}"
        )


def _dump_matrices(result: ExperimentResult, run_config: RunConfig) -> None:
    wanted = {
        "F.csv": ("f", run_config.dump_f),
        "S0.csv": ("s0", run_config.dump_s0),
        "D0.csv": ("d0", run_config.dump_d0),
        "S_final.csv": ("s", run_config.dump_final),
        "D_final.csv": ("d", run_config.dump_final),
    }
    for name, (key, enabled) in wanted.items():
        if enabled:
            write_matrix_csv(run_config.out_dir / name, result.matrices[key])


def cmd_run(args: argparse.Namespace, *, logger: Any) -> int:
    run_config = build_run_config(args)
    scenario = load_valid_scenario(run_config)

    history = None
    if not args.no_history:
        history = TinyDbRunHistoryRepo(
            run_config.out_dir / HISTORY_FILE,
            max_length=config.RUN_HISTORY_MAX_LENGTH,
            logger=logger,
        )
    service = ExperimentService(
        logger=logger,
        run_history=history,
        enable_langgraph=config.ENABLE_LANGGRAPH,
    )
    try:
        result = service.run_experiment(scenario, run_config)
        write_reports(run_config.out_dir, result.run_id, run_config, result.summary, result.reports)
        _dump_matrices(result, run_config)
        service.record_run(result, run_config)
    finally:
        if history is not None:
            history.close()

    print_reports(result.reports)
    print(f"run {result.run_id} written to {run_config.out_dir}")
    return 0


def register_run_command(subparsers: Any) -> None:
    """Attach the ``run`` subcommand to the provided subparsers."""

    parser = subparsers.add_parser("run", help="run the fusion pipeline and evaluate it")
    add_run_config_arguments(parser)
    add_rcpm_arguments(parser)
    parser.add_argument(
        "--include-star", action="store_true", default=None, help="also run the RCPM* variant"
    )
    parser.add_argument(
        "--guided-radius",
        type=float,
        default=None,
        help="evaluate signal-guided search with this camera radius (m)",
    )
    for flag, what in (
        ("--dump-f", "F"),
        ("--dump-s0", "S0"),
        ("--dump-d0", "D0"),
        ("--dump-final", "final S and D"),
    ):
        parser.add_argument(flag, action="store_true", default=None, help=f"write {what} as CSV")
    parser.add_argument(
        "--no-history", action="store_true", help="do not record the run in the run history"
    )
    parser.set_defaults(func=cmd_run)
