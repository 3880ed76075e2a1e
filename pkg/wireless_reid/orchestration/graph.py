"""LangGraph orchestration of the fusion pipeline."""

from __future__ import annotations

from importlib import import_module
from types import ModuleType
from typing import Any, Protocol, TypedDict, cast

import numpy as np
from numpy.typing import NDArray

from wireless_reid.core.models import Scenario
from wireless_reid.services.eval_service import MethodReport
from wireless_reid.services.experiment_config import RunConfig
from wireless_reid.services.rcpm_service import RcpmConfig, RcpmVariant

try:
    LANGGRAPH_GRAPH: ModuleType = import_module("langgraph.graph")
except ModuleNotFoundError as exc:  # pragma: no cover - hard dependency
    raise RuntimeError("langgraph is required to build the pipeline graph") from exc

END: Any = LANGGRAPH_GRAPH.END
StateGraph: Any = LANGGRAPH_GRAPH.StateGraph

Matrix = NDArray[np.float64]


class PipelineService(Protocol):
    """Interface required by the pipeline graph builder."""

    def compute_feature_distances(self, scenario: Scenario, run_config: RunConfig) -> Matrix: ...

    def compute_visual_affinity(self, f: Matrix) -> Matrix: ...

    def compute_distance_matrix(self, scenario: Scenario) -> Matrix: ...

    def propagate(
        self, s0: Matrix, d0: Matrix, rcpm_config: RcpmConfig
    ) -> tuple[Matrix, Matrix]: ...

    def evaluate_methods(
        self,
        scenario: Scenario,
        run_config: RunConfig,
        matrices: dict[str, Matrix],
    ) -> list[MethodReport]: ...


class PipelineState(TypedDict, total=False):
    """State container passed through the graph nodes."""

    scenario: Scenario
    run_config: RunConfig
    f: Matrix
    s0: Matrix
    d0: Matrix
    s: Matrix
    d: Matrix
    s_star: Matrix
    d_star: Matrix
    reports: list[MethodReport]


class GraphRunner(Protocol):
    """Subset of the LangGraph runner interface used by the experiment service."""

    def invoke(self, state: PipelineState) -> PipelineState: ...


def build_pipeline_graph(*, pipeline_service: PipelineService, logger: Any) -> GraphRunner:
    """Return a compiled graph: F -> S0 -> D0 -> RCPM [-> RCPM*] -> evaluation."""

    graph = StateGraph(PipelineState)

    def feature_distances(state: PipelineState) -> dict[str, Any]:
        f = pipeline_service.compute_feature_distances(state["scenario"], state["run_config"])
        logger.info("LangGraph node=feature_distances_node shape=%s", f.shape)
        return {"f": f}

    def visual_affinity(state: PipelineState) -> dict[str, Any]:
        return {"s0": pipeline_service.compute_visual_affinity(state["f"])}

    def distance_matrix(state: PipelineState) -> dict[str, Any]:
        d0 = pipeline_service.compute_distance_matrix(state["scenario"])
        logger.info(
            "LangGraph node=distance_matrix_node shape=%s finite=%s",
            d0.shape,
            int(np.isfinite(d0).sum()),
        )
        return {"d0": d0}

    def rcpm(state: PipelineState) -> dict[str, Any]:
        s, d = pipeline_service.propagate(state["s0"], state["d0"], state["run_config"].rcpm)
        return {"s": s, "d": d}

    def route_star(state: PipelineState) -> str:
        return "star" if state["run_config"].include_star else "evaluate"

    def rcpm_star(state: PipelineState) -> dict[str, Any]:
        star_config = state["run_config"].rcpm.model_copy(update={"variant": RcpmVariant.STAR})
        s, d = pipeline_service.propagate(state["s0"], state["d0"], star_config)
        return {"s_star": s, "d_star": d}

    def evaluate(state: PipelineState) -> dict[str, Any]:
        matrices = {
            key: cast(Matrix, state[key])  # type: ignore[literal-required]
            for key in ("s0", "d0", "s", "d", "s_star", "d_star")
            if key in state
        }
        reports = pipeline_service.evaluate_methods(
            state["scenario"], state["run_config"], matrices
        )
        logger.info("LangGraph node=evaluate_node reports=%s", len(reports))
        return {"reports": reports}

    graph.add_node("feature_distances_node", feature_distances)
    graph.add_node("visual_affinity_node", visual_affinity)
    graph.add_node("distance_matrix_node", distance_matrix)
    graph.add_node("rcpm_node", rcpm)
    graph.add_node("rcpm_star_node", rcpm_star)
    graph.add_node("evaluate_node", evaluate)

    graph.set_entry_point("feature_distances_node")
    graph.add_edge("feature_distances_node", "visual_affinity_node")
    graph.add_edge("visual_affinity_node", "distance_matrix_node")
    graph.add_edge("distance_matrix_node", "rcpm_node")
    graph.add_conditional_edges(
        "rcpm_node",
        route_star,
        {"star": "rcpm_star_node", "evaluate": "evaluate_node"},
    )
    graph.add_edge("rcpm_star_node", "evaluate_node")
    graph.add_edge("evaluate_node", END)

    compiled = graph.compile()
    return cast(GraphRunner, compiled)
