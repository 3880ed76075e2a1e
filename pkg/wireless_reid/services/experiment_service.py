"""Experiment orchestration: the fusion pipeline, matrix evaluation and parameter sweeps."""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any

import numpy as np
from numpy.typing import NDArray

from wireless_reid.adapters.results_writer import format_value, metric_rows
from wireless_reid.adapters.run_history.base import RunHistoryRepository
from wireless_reid.core.errors import InvalidConfigError
from wireless_reid.core.models import Scenario, ScenarioSummary, summarize
from wireless_reid.core.validation import parse_model
from wireless_reid.orchestration.graph import GraphRunner, PipelineState, build_pipeline_graph
from wireless_reid.services import affinity_service, align_service, eval_service, rcpm_service
from wireless_reid.services.eval_service import MethodReport, MetricReport, Task
from wireless_reid.services.experiment_config import RunConfig, SweepGrid
from wireless_reid.services.rcpm_service import RcpmConfig, RcpmVariant

Matrix = NDArray[np.float64]

METHOD_BASELINE_VISUAL = "baseline-visual"
METHOD_SM_BASELINE = "SM-Baseline"
METHOD_RCPM = "RCPM"
METHOD_RCPM_STAR = "RCPM*"
METHOD_RCPM_GUIDED = "RCPM+guided"
METHOD_EXTERNAL = "external"

_MATRIX_KEYS = ("f", "s0", "d0", "s", "d", "s_star", "d_star")


@dataclass(frozen=True)
class ExperimentResult:
    """Everything one pipeline run produced."""

    run_id: str
    summary: ScenarioSummary
    reports: tuple[MethodReport, ...]
    matrices: dict[str, Matrix] = field(default_factory=dict)


def run_id_for(scenario: Scenario, run_config: RunConfig) -> str:
    """Content hash of the scenario and every result-affecting setting."""

    digest = hashlib.sha256()
    digest.update(scenario.model_dump_json().encode("utf-8"))
    digest.update(
        run_config.model_dump_json(
            exclude={"scenario", "out_dir", "dump_f", "dump_s0", "dump_d0", "dump_final"}
        ).encode("utf-8")
    )
    return digest.hexdigest()


def _method_for(variant: RcpmVariant) -> str:
    return METHOD_RCPM if variant is RcpmVariant.STANDARD else METHOD_RCPM_STAR


class ExperimentService:
    """Run the fusion pipeline, evaluate it and keep a history of runs."""

    def __init__(
        self,
        *,
        logger: Any,
        run_history: RunHistoryRepository | None = None,
        enable_langgraph: bool = False,
    ) -> None:
        self._logger = logger
        self._run_history = run_history
        self._enable_langgraph = enable_langgraph
        self._graph_runner: GraphRunner | None = None

    # Pipeline steps, also used as graph nodes.

    def compute_feature_distances(self, scenario: Scenario, run_config: RunConfig) -> Matrix:
        return affinity_service.feature_distances(scenario, run_config.metric)

    def compute_visual_affinity(self, f: Matrix) -> Matrix:
        return affinity_service.visual_affinity(f, logger=self._logger)

    def compute_distance_matrix(self, scenario: Scenario) -> Matrix:
        return align_service.distance_matrix(scenario)

    def propagate(self, s0: Matrix, d0: Matrix, rcpm_config: RcpmConfig) -> tuple[Matrix, Matrix]:
        return rcpm_service.run(s0, d0, rcpm_config, logger=self._logger)

    def evaluate_methods(
        self,
        scenario: Scenario,
        run_config: RunConfig,
        matrices: dict[str, Matrix],
    ) -> list[MethodReport]:
        """Reports in output order: baseline-visual, SM-Baseline, RCPM, RCPM*, RCPM+guided."""

        max_rank = run_config.max_rank
        exclude = run_config.exclude_same_camera

        def reid(s: Matrix) -> MetricReport:
            return eval_service.evaluate_reid(
                s, scenario, max_rank=max_rank, exclude_same_camera=exclude
            )

        def signal(d: Matrix) -> MetricReport:
            return eval_service.evaluate_signal(d, scenario, max_rank=max_rank)

        reports = [
            MethodReport(
                method=METHOD_BASELINE_VISUAL, task=Task.REID, report=reid(matrices["s0"])
            ),
            MethodReport(
                method=METHOD_SM_BASELINE,
                task=Task.SIGNAL,
                report=eval_service.sm_baseline(matrices["d0"], scenario, max_rank=max_rank),
            ),
            MethodReport(method=METHOD_RCPM, task=Task.REID, report=reid(matrices["s"])),
            MethodReport(method=METHOD_RCPM, task=Task.SIGNAL, report=signal(matrices["d"])),
        ]
        if "s_star" in matrices and "d_star" in matrices:
            reports.append(
                MethodReport(
                    method=METHOD_RCPM_STAR, task=Task.REID, report=reid(matrices["s_star"])
                )
            )
            reports.append(
                MethodReport(
                    method=METHOD_RCPM_STAR, task=Task.SIGNAL, report=signal(matrices["d_star"])
                )
            )
        if run_config.guided_radius is not None:
            guided = eval_service.evaluate_guided_reid(
                matrices["s"],
                matrices["d"],
                scenario,
                radius=run_config.guided_radius,
                max_rank=max_rank,
                exclude_same_camera=exclude,
            )
            reports.append(MethodReport(method=METHOD_RCPM_GUIDED, task=Task.REID, report=guided))

        for entry in reports:
            self._log_report(entry)
        return reports

    # Entry points.

    def run_experiment(self, scenario: Scenario, run_config: RunConfig) -> ExperimentResult:
        summary = summarize(scenario)
        self._logger.info(
            "experiment sequences=%s signals=%s queries=%s signal_queries=%s",
            summary.n_sequences,
            summary.n_signals,
            summary.n_queries,
            summary.n_signal_queries,
        )

        if self._enable_langgraph:
            matrices, reports = self._run_langgraph_flow(scenario, run_config)
        else:
            matrices, reports = self._run_sequential_flow(scenario, run_config)

        return ExperimentResult(
            run_id=run_id_for(scenario, run_config),
            summary=summary,
            reports=tuple(reports),
            matrices=matrices,
        )

    def evaluate_matrices(
        self,
        scenario: Scenario,
        run_config: RunConfig,
        s: Matrix | None,
        d: Matrix | None,
        *,
        method: str = METHOD_EXTERNAL,
    ) -> list[MethodReport]:
        """Score externally produced matrices against the scenario's ground truth."""

        n, m = len(scenario.sequences), len(scenario.signals)
        reports: list[MethodReport] = []
        if s is not None:
            if s.shape != (n, n):
                raise InvalidConfigError("s", f"expected shape ({n}, {n}), got {s.shape}")
            reid = eval_service.evaluate_reid(
                s,
                scenario,
                max_rank=run_config.max_rank,
                exclude_same_camera=run_config.exclude_same_camera,
            )
            reports.append(MethodReport(method=method, task=Task.REID, report=reid))
        if d is not None:
            if d.shape != (n, m):
                raise InvalidConfigError("d", f"expected shape ({n}, {m}), got {d.shape}")
            signal = eval_service.evaluate_signal(d, scenario, max_rank=run_config.max_rank)
            reports.append(MethodReport(method=method, task=Task.SIGNAL, report=signal))
        if not reports:
            raise InvalidConfigError("matrices", "supply at least one of S or D")
        for entry in reports:
            self._log_report(entry)
        return reports

    def sweep(
        self,
        scenario: Scenario,
        grid: SweepGrid,
        run_config: RunConfig,
        *,
        workers: int = 1,
    ) -> list[dict[str, str]]:
        """Rank-1 and mAP of both subtasks for every grid point, in grid order."""

        if workers < 1:
            raise InvalidConfigError("workers", f"must be at least 1, got {workers}", module="cli")

        configs = [
            parse_model(
                RcpmConfig,
                {
                    "k": k,
                    "sigma": sigma,
                    "iterations": iterations,
                    "fusion_weight": run_config.rcpm.fusion_weight,
                    "variant": variant,
                },
                module="rcpm",
            )
            for k, sigma, iterations, variant in product(
                grid.k, grid.sigma, grid.iterations, grid.variant
            )
        ]
        n = len(scenario.sequences)
        for point in configs:
            if point.k > n:
                raise InvalidConfigError(
                    "k", f"must not exceed N={n}, got {point.k}", module="rcpm"
                )

        f = self.compute_feature_distances(scenario, run_config)
        s0 = self.compute_visual_affinity(f)
        d0 = self.compute_distance_matrix(scenario)
        self._logger.info("sweep grid_points=%s workers=%s", len(configs), workers)

        def grid_point(point: RcpmConfig) -> list[dict[str, str]]:
            s, d = rcpm_service.run(s0, d0, point)
            reid = eval_service.evaluate_reid(
                s,
                scenario,
                max_rank=1,
                exclude_same_camera=run_config.exclude_same_camera,
            )
            signal = eval_service.evaluate_signal(d, scenario, max_rank=1)
            base = {
                "k": str(point.k),
                "sigma": repr(point.sigma),
                "iterations": str(point.iterations),
                "variant": point.variant.value,
                "method": _method_for(point.variant),
            }
            return [
                {**base, "task": task.value, "metric": metric, "rank": rank, "value": value}
                for task, report in ((Task.REID, reid), (Task.SIGNAL, signal))
                for metric, rank, value in (
                    ("cmc", "1", format_value(report.cmc[0])),
                    ("mAP", "", format_value(report.map)),
                )
            ]

        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(grid_point, configs))
        return [row for chunk in chunks for row in chunk]

    def record_run(self, result: ExperimentResult, run_config: RunConfig) -> None:
        if self._run_history is None:
            return
        record = {
            "config": run_config.model_dump(mode="json"),
            "summary": result.summary.model_dump(mode="json"),
            "rows": metric_rows(result.reports),
        }
        self._run_history.save(result.run_id, record)
        self._logger.info("run history record=%s", result.run_id)

    # Flows.

    def _run_sequential_flow(
        self, scenario: Scenario, run_config: RunConfig
    ) -> tuple[dict[str, Matrix], list[MethodReport]]:
        f = self.compute_feature_distances(scenario, run_config)
        s0 = self.compute_visual_affinity(f)
        d0 = self.compute_distance_matrix(scenario)
        s, d = self.propagate(s0, d0, run_config.rcpm)
        matrices = {"f": f, "s0": s0, "d0": d0, "s": s, "d": d}
        if run_config.include_star:
            star = run_config.rcpm.model_copy(update={"variant": RcpmVariant.STAR})
            matrices["s_star"], matrices["d_star"] = self.propagate(s0, d0, star)
        return matrices, self.evaluate_methods(scenario, run_config, matrices)

    def _run_langgraph_flow(
        self, scenario: Scenario, run_config: RunConfig
    ) -> tuple[dict[str, Matrix], list[MethodReport]]:
        if self._graph_runner is None:
            self._graph_runner = build_pipeline_graph(pipeline_service=self, logger=self._logger)

        initial_state: PipelineState = {"scenario": scenario, "run_config": run_config}
        state = self._graph_runner.invoke(initial_state)
        matrices = {
            key: state[key]  # type: ignore[literal-required]
            for key in _MATRIX_KEYS
            if key in state
        }
        return matrices, list(state.get("reports", []))

    def _log_report(self, entry: MethodReport) -> None:
        report = entry.report
        rank1 = report.cmc[0] if report.cmc else 0.0
        self._logger.info(
            "method=%s task=%s queries=%s rank1=%.4f mAP=%.4f",
            entry.method,
            entry.task.value,
            len(report.query_ids),
            rank1,
            report.map,
        )
