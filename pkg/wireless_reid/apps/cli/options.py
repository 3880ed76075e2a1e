"""Flags shared by several subcommands and the config layering behind them."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from config import config
from wireless_reid.adapters.scenario_store import load_scenario, read_json
from wireless_reid.core.errors import InvalidConfigError, ScenarioIOError
from wireless_reid.core.models import Scenario
from wireless_reid.core.validation import parse_model, validate
from wireless_reid.services.affinity_service import FeatureMetric
from wireless_reid.services.experiment_config import RunConfig
from wireless_reid.services.rcpm_service import RcpmVariant

_MAX_REPORTED_VIOLATIONS = 3


def add_seed_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="random seed")


def add_run_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Scenario, config file and evaluation switches common to ``run``, ``sweep`` and ``eval``."""

    parser.add_argument("--scenario", type=Path, default=None, help="scenario JSON file")
    parser.add_argument("--config", type=Path, default=None, help="run config JSON file")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument(
        "--metric", choices=[m.value for m in FeatureMetric], default=None, help="feature metric"
    )
    parser.add_argument("--max-rank", type=int, default=None, help="CMC length")
    parser.add_argument(
        "--keep-same-camera",
        dest="exclude_same_camera",
        action="store_const",
        const=False,
        default=None,
        help="keep same-identity sequences of the query camera in the gallery",
    )
    add_seed_argument(parser)


def add_rcpm_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=None, help="neighborhood size K")
    parser.add_argument("--sigma", type=float, default=None, help="distance threshold")
    parser.add_argument("--iters", type=int, default=None, help="propagation rounds")
    parser.add_argument("--fusion-weight", type=float, default=None, help="affinity weight w")
    parser.add_argument(
        "--variant", choices=[v.value for v in RcpmVariant], default=None, help="RCPM variant"
    )


def _environment_defaults() -> dict[str, Any]:
    return {
        "metric": config.FEATURE_METRIC,
        "rcpm": {
            "k": config.RCPM_K,
            "sigma": config.RCPM_SIGMA,
            "iterations": config.RCPM_ITERATIONS,
            "fusion_weight": config.RCPM_FUSION_WEIGHT,
            "variant": config.RCPM_VARIANT,
        },
        "max_rank": config.MAX_RANK,
        "exclude_same_camera": config.EXCLUDE_SAME_CAMERA,
        "seed": config.DEFAULT_SEED,
    }


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _flag_overrides(args: argparse.Namespace) -> dict[str, Any]:
    flags = vars(args)
    top = {
        "scenario": "scenario",
        "metric": "metric",
        "max_rank": "max_rank",
        "exclude_same_camera": "exclude_same_camera",
        "seed": "seed",
        "out": "out_dir",
        "include_star": "include_star",
        "guided_radius": "guided_radius",
        "dump_f": "dump_f",
        "dump_s0": "dump_s0",
        "dump_d0": "dump_d0",
        "dump_final": "dump_final",
    }
    nested = {
        "k": "k",
        "sigma": "sigma",
        "iters": "iterations",
        "fusion_weight": "fusion_weight",
        "variant": "variant",
    }
    overrides: dict[str, Any] = {
        field: flags[flag] for flag, field in top.items() if flags.get(flag) is not None
    }
    rcpm = {field: flags[flag] for flag, field in nested.items() if flags.get(flag) is not None}
    if rcpm:
        overrides["rcpm"] = rcpm
    return overrides


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Layer defaults: CLI flag > config file > environment > built-in default."""

    layered = _environment_defaults()
    config_path: Path | None = getattr(args, "config", None)
    if config_path is not None:
        data = read_json(config_path)
        if not isinstance(data, dict):
            raise ScenarioIOError(config_path, "expected a JSON object")
        layered = _merge(layered, data)
    layered = _merge(layered, _flag_overrides(args))
    return parse_model(RunConfig, layered)


def load_valid_scenario(run_config: RunConfig) -> Scenario:
    """Load the configured scenario and refuse one that breaks its invariants."""

    if run_config.scenario is None:
        raise InvalidConfigError("scenario", "no scenario file given (use --scenario)")
    scenario = load_scenario(run_config.scenario)
    violations = validate(scenario)
    if violations:
        shown = "; ".join(violations[:_MAX_REPORTED_VIOLATIONS])
        more = len(violations) - _MAX_REPORTED_VIOLATIONS
        suffix = f" (+{more} more)" if more > 0 else ""
        raise ScenarioIOError(run_config.scenario, f"invalid scenario: {shown}{suffix}")
    return scenario
