"""Run and sweep configuration documents."""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from wireless_reid.services.affinity_service import FeatureMetric
from wireless_reid.services.eval_service import DEFAULT_MAX_RANK
from wireless_reid.services.rcpm_service import (
    DEFAULT_ITERATIONS,
    DEFAULT_K,
    DEFAULT_SIGMA,
    RcpmConfig,
    RcpmVariant,
)


class RunConfig(BaseModel):
    """Everything that determines one experiment apart from the scenario contents."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Path | None = None
    metric: FeatureMetric = FeatureMetric.EUCLIDEAN
    rcpm: RcpmConfig = RcpmConfig()
    include_star: bool = False
    exclude_same_camera: bool = True
    guided_radius: float | None = Field(default=None, gt=0)
    max_rank: int = Field(default=DEFAULT_MAX_RANK, ge=1)
    out_dir: Path = Path("results")
    dump_f: bool = False
    dump_s0: bool = False
    dump_d0: bool = False
    dump_final: bool = False
    seed: int = 0


class SweepGrid(BaseModel):
    """Parameter axes of an ablation sweep; every axis needs at least one value."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    k: tuple[int, ...] = Field(default=(DEFAULT_K,), min_length=1)
    sigma: tuple[float, ...] = Field(default=(DEFAULT_SIGMA,), min_length=1)
    iterations: tuple[int, ...] = Field(default=(DEFAULT_ITERATIONS,), min_length=1)
    variant: tuple[RcpmVariant, ...] = Field(default=(RcpmVariant.STANDARD,), min_length=1)


# Distance threshold for the simulator's benchmark preset: a phone and its owner's
# sequences sit about 10 m apart, while two different pedestrians share a nearby phone
# only at 20 m and beyond.
BENCHMARK_SIGMA = 30.0
BENCHMARK_RCPM = RcpmConfig(k=DEFAULT_K, sigma=BENCHMARK_SIGMA, iterations=DEFAULT_ITERATIONS)
