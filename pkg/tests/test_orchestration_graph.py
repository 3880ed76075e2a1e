from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from conftest import DummyLogger

from wireless_reid.core.models import Scenario
from wireless_reid.orchestration.graph import Matrix, PipelineState, build_pipeline_graph
from wireless_reid.services.eval_service import MethodReport, MetricReport, Task
from wireless_reid.services.experiment_config import RunConfig
from wireless_reid.services.rcpm_service import RcpmConfig, RcpmVariant


@dataclass
class StubService:
    calls: list[str] = field(default_factory=list)

    def compute_feature_distances(self, scenario: Scenario, run_config: RunConfig) -> Matrix:
        self.calls.append("feature_distances")
        return np.zeros((2, 2))

    def compute_visual_affinity(self, f: Matrix) -> Matrix:
        self.calls.append("visual_affinity")
        return np.eye(2)

    def compute_distance_matrix(self, scenario: Scenario) -> Matrix:
        self.calls.append("distance_matrix")
        return np.ones((2, 1))

    def propagate(self, s0: Matrix, d0: Matrix, rcpm_config: RcpmConfig) -> tuple[Matrix, Matrix]:
        self.calls.append(f"propagate:{rcpm_config.variant.value}")
        marker = 2.0 if rcpm_config.variant is RcpmVariant.STAR else 1.0
        return s0 * marker, d0 * marker

    def evaluate_methods(
        self,
        scenario: Scenario,
        run_config: RunConfig,
        matrices: dict[str, Matrix],
    ) -> list[MethodReport]:
        self.calls.append("evaluate:" + ",".join(sorted(matrices)))
        report = MetricReport(cmc=(1.0,), map=1.0, query_ids=("v0",), per_query_ap=(1.0,))
        return [MethodReport(method="RCPM", task=Task.REID, report=report)]


def test_graph_runs_nodes_in_pipeline_order(small_scenario: Scenario) -> None:
    service = StubService()
    logger = DummyLogger()
    runner = build_pipeline_graph(pipeline_service=service, logger=logger)

    state: PipelineState = {"scenario": small_scenario, "run_config": RunConfig()}
    result = runner.invoke(state)

    assert service.calls == [  # noqa: S101
        "feature_distances",
        "visual_affinity",
        "distance_matrix",
        "propagate:standard",
        "evaluate:d,d0,s,s0",
    ]
    assert len(result["reports"]) == 1  # noqa: S101
    assert "s_star" not in result  # noqa: S101
    assert any("evaluate_node" in line for line in logger.messages("info"))  # noqa: S101


def test_graph_routes_through_star_when_requested(small_scenario: Scenario) -> None:
    service = StubService()
    runner = build_pipeline_graph(pipeline_service=service, logger=DummyLogger())

    state: PipelineState = {
        "scenario": small_scenario,
        "run_config": RunConfig(include_star=True),
    }
    result = runner.invoke(state)

    assert "propagate:star" in service.calls  # noqa: S101
    assert service.calls[-1] == "evaluate:d,d0,d_star,s,s0,s_star"  # noqa: S101
    assert np.array_equal(result["s_star"], 2.0 * np.eye(2))  # noqa: S101
