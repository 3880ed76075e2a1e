"""Command-line application factory."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from typing import Any

from wireless_reid.apps.cli.commands.evaluate import register_eval_command
from wireless_reid.apps.cli.commands.georef import register_georef_command
from wireless_reid.apps.cli.commands.run import register_run_command
from wireless_reid.apps.cli.commands.simulate import register_simulate_command
from wireless_reid.apps.cli.commands.sweep import register_sweep_command
from wireless_reid.core.errors import WirelessReidError


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with every subcommand registered."""

    parser = argparse.ArgumentParser(
        prog="wireless-reid",
        description="Fuse video re-identification with wireless positioning trajectories.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    register_simulate_command(subparsers)
    register_georef_command(subparsers)
    register_run_command(subparsers)
    register_sweep_command(subparsers)
    register_eval_command(subparsers)

    return parser


def main(argv: Sequence[str] | None = None, *, logger: Any | None = None) -> int:
    """Run one subcommand; returns the process exit code."""

    if logger is None:
        from logger import logger as app_logger

        logger = app_logger

    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args, logger=logger))
    except (WirelessReidError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc, exc_info=True)
        return 1
