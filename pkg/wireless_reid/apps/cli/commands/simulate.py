"""``simulate``: generate a synthetic scenario file."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from config import config
from wireless_reid.adapters.scenario_store import read_json, save_scenario
from wireless_reid.apps.cli.options import add_seed_argument
from wireless_reid.core.errors import InvalidConfigError, ScenarioIOError
from wireless_reid.core.models import summarize
from wireless_reid.core.validation import parse_model
from wireless_reid.services import simgen_service
from wireless_reid.services.simgen_service import DEFAULT_PRESET, SIM_PRESETS, SimConfig

DEFAULT_SCENARIO_PATH = Path("scenario.json")


def load_sim_config(
    path: Path | None, seed: int | None, preset: str = DEFAULT_PRESET
) -> SimConfig:
    """Simulator config layered as seed flag > config file > preset > defaults."""

    if preset not in SIM_PRESETS:
        raise InvalidConfigError("preset", f"unknown preset {preset!r}", module="simgen")
    data: dict[str, Any] = {**SIM_PRESETS[preset], "seed": config.DEFAULT_SEED}
    if path is not None:
        loaded = read_json(path)
        if not isinstance(loaded, dict):
            raise ScenarioIOError(path, "expected a JSON object")
        data.update(loaded)
    if seed is not None:
        data["seed"] = seed
    return parse_model(SimConfig, data, module="simgen")


def cmd_simulate(args: argparse.Namespace, *, logger: Any) -> int:
    sim_config = load_sim_config(args.config, args.seed, args.preset)
    scenario = simgen_service.generate(sim_config, logger=logger)
    save_scenario(scenario, args.out)

    summary = summarize(scenario)
    print(
        f"wrote {args.out}: sequences={summary.n_sequences} signals={summary.n_signals} "
        f"queries={summary.n_queries} signal_queries={summary.n_signal_queries} "
        f"identities={summary.n_identities} cameras={summary.n_cameras}"
    )
    return 0


def register_simulate_command(subparsers: Any) -> None:
    """Attach the ``simulate`` subcommand to the provided subparsers."""

    parser = subparsers.add_parser("simulate", help="generate a synthetic scenario")
    parser.add_argument("--config", type=Path, default=None, help="simulator config JSON file")
    parser.add_argument(
        "--preset",
        choices=sorted(SIM_PRESETS),
        default=DEFAULT_PRESET,
        help="named simulator setup the config file and seed refine",
    )
    parser.add_argument(
        "--out", type=Path, default=DEFAULT_SCENARIO_PATH, help="scenario JSON to write"
    )
    add_seed_argument(parser)
    parser.set_defaults(func=cmd_simulate)
