from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from conftest import DummyLogger

from wireless_reid.core.errors import InvalidConfigError
from wireless_reid.core.validation import parse_model
from wireless_reid.services.affinity_service import embedding_distances, visual_affinity
from wireless_reid.services.rcpm_service import (
    RcpmConfig,
    RcpmState,
    RcpmVariant,
    affinity_update,
    distance_update,
    iterate,
    min_avg_distance,
    run,
    top_k_neighbors,
)

INF = math.inf


def _state(s: np.ndarray, d: np.ndarray) -> RcpmState:
    return RcpmState(s=s, d=d, s0=s, d0=d)


def _oracle(
    s0: np.ndarray, d0: np.ndarray, config: RcpmConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Loop-by-loop propagation written straight from the update rules."""

    n, m = d0.shape
    star = config.variant is RcpmVariant.STAR
    w = config.fusion_weight
    s_prev, d_prev = s0.copy(), d0.copy()
    for _ in range(config.iterations):
        base = s_prev if star else s0
        s_new = base.copy()
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                d_hat = min(((d_prev[i, c] + d_prev[j, c]) / 2 for c in range(m)), default=INF)
                if d_hat <= config.sigma:
                    s_new[i, j] = base[i, j] * w + (1 - d_hat / config.sigma) * (1 - w)
        source = d_prev if star else d0
        d_new = np.empty_like(d0)
        for i in range(n):
            others = sorted((j for j in range(n) if j != i), key=lambda j: (-s_new[i, j], j))
            psi = [i, *others[: config.k - 1]]
            for c in range(m):
                num = den = 0.0
                for q in psi:
                    if math.isfinite(source[q, c]):
                        num += source[q, c] * s_new[i, q]
                        den += s_new[i, q]
                d_new[i, c] = num / den if den > 0 else d0[i, c]
        s_prev, d_prev = s_new, d_new
    return s_prev, d_prev


def _instance(seed: int, n: int = 10, m: int = 3) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    s0 = visual_affinity(embedding_distances(rng.normal(size=(n, 6))))
    d0 = rng.uniform(0.0, 120.0, size=(n, m))
    d0[rng.random(size=(n, m)) < 0.2] = INF
    return s0, d0


def test_min_avg_distance_examples() -> None:
    d = np.array([[10.0, INF], [20.0, 5.0], [INF, INF], [8.0, 12.0]])

    assert min_avg_distance(d, 0, 1) == 15.0  # noqa: S101
    assert min_avg_distance(d, 2, 2) == INF  # noqa: S101
    assert min_avg_distance(d, 3, 3) == 8.0  # noqa: S101


def test_affinity_update_fuses_close_pairs_only() -> None:
    s0 = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.2], [0.3, 0.2, 1.0]])
    d = np.array([[37.0], [37.0], [123.0]])

    s1 = affinity_update(_state(s0, d), RcpmConfig(sigma=74.0, fusion_weight=0.5))

    assert s1[0, 1] == pytest.approx(0.55, abs=1e-12)  # noqa: S101
    assert s1[0, 2] == 0.3  # noqa: S101
    assert np.array_equal(np.diag(s1), np.ones(3))  # noqa: S101


def test_top_k_neighbors() -> None:
    s = np.array(
        [
            [1.0, 0.9, 0.2, 0.8],
            [0.9, 1.0, 0.5, 0.5],
            [0.2, 0.5, 1.0, 0.1],
            [0.8, 0.5, 0.1, 1.0],
        ]
    )

    assert top_k_neighbors(s, 0, 1).tolist() == [0]  # noqa: S101
    assert top_k_neighbors(s, 0, 3).tolist() == [0, 1, 3]  # noqa: S101
    assert top_k_neighbors(s, 1, 3).tolist() == [1, 0, 2]  # noqa: S101
    with pytest.raises(InvalidConfigError):
        top_k_neighbors(s, 0, 5)


def test_distance_update_weighted_average() -> None:
    s = np.array([[1.0, 0.5], [0.5, 1.0]])
    d0 = np.array([[10.0, INF], [20.0, INF]])

    d1 = distance_update(_state(s, d0), RcpmConfig(k=2))

    assert d1[0, 0] == pytest.approx(40.0 / 3.0, abs=1e-12)  # noqa: S101
    assert d1[0, 1] == INF  # noqa: S101


def test_distance_update_with_k_one_keeps_own_distance() -> None:
    s0, d0 = _instance(2)

    d1 = distance_update(_state(s0, d0), RcpmConfig(k=1))

    assert np.array_equal(d1, d0)  # noqa: S101


def test_distance_update_falls_back_to_initial_distance() -> None:
    s = np.array([[1.0, 0.9], [0.9, 1.0]])
    d0 = np.array([[INF], [7.0]])
    state = RcpmState(s=s, d=np.array([[INF], [INF]]), s0=s, d0=d0)

    d1 = distance_update(state, RcpmConfig(k=2, variant=RcpmVariant.STAR))

    assert d1[0, 0] == INF  # noqa: S101
    assert d1[1, 0] == 7.0  # noqa: S101


def test_zero_iterations_is_identity() -> None:
    s0, d0 = _instance(3)

    s, d = run(s0, d0, RcpmConfig(iterations=0))

    assert np.array_equal(s, s0)  # noqa: S101
    assert np.array_equal(d, d0)  # noqa: S101


@pytest.mark.parametrize("iterations", [1, 4, 7])
def test_single_neighbor_far_pairs_is_identity(iterations: int) -> None:
    s0, _ = _instance(4)
    d0 = np.random.default_rng(4).uniform(100.0, 200.0, size=(10, 3))

    s, d = run(s0, d0, RcpmConfig(k=1, sigma=50.0, iterations=iterations))

    assert np.array_equal(s, s0)  # noqa: S101
    assert np.array_equal(d, d0)  # noqa: S101


@pytest.mark.parametrize("variant", list(RcpmVariant))
@pytest.mark.parametrize("seed", range(5))
def test_run_matches_loop_oracle(seed: int, variant: RcpmVariant) -> None:
    s0, d0 = _instance(seed)
    config = RcpmConfig(k=4, sigma=74.0, iterations=4, variant=variant)

    s, d = run(s0, d0, config)
    s_ref, d_ref = _oracle(s0, d0, config)

    assert np.abs(s - s_ref).max() <= 1e-9  # noqa: S101
    finite = np.isfinite(d_ref)
    assert np.array_equal(np.isfinite(d), finite)  # noqa: S101
    assert np.abs(d[finite] - d_ref[finite]).max() <= 1e-9  # noqa: S101
    assert np.array_equal(np.diag(s), np.ones(10))  # noqa: S101
    assert s.min() >= 0.0  # noqa: S101
    assert s.max() <= 1.0  # noqa: S101


def test_variants_agree_on_the_first_round() -> None:
    s0, d0 = _instance(8)

    standard = run(s0, d0, RcpmConfig(iterations=1))
    star = run(s0, d0, RcpmConfig(iterations=1, variant=RcpmVariant.STAR))

    assert np.array_equal(standard[0], star[0])  # noqa: S101
    assert np.array_equal(standard[1], star[1])  # noqa: S101


def test_run_logs_each_iteration(logger: DummyLogger) -> None:
    s0, d0 = _instance(1)

    run(s0, d0, RcpmConfig(iterations=3), logger=logger)

    assert len(logger.messages("info")) == 1  # noqa: S101
    assert len(logger.messages("debug")) == 3  # noqa: S101


def test_run_rejects_inconsistent_inputs() -> None:
    s0, d0 = _instance(1)

    with pytest.raises(InvalidConfigError):
        run(s0, d0, RcpmConfig(k=11))
    with pytest.raises(InvalidConfigError):
        run(s0, d0[:5], RcpmConfig())
    with pytest.raises(InvalidConfigError) as excinfo:
        parse_model(RcpmConfig, {"sigma": 0.0}, module="rcpm")
    assert excinfo.value.field == "sigma"  # noqa: S101


def test_iterate_yields_every_round_of_run() -> None:
    s0, d0 = _instance(6)
    config = RcpmConfig(k=3, iterations=4)

    states = list(iterate(s0, d0, config))

    assert len(states) == 4  # noqa: S101
    for t, state in enumerate(states, start=1):
        s, d = run(s0, d0, config.model_copy(update={"iterations": t}))
        assert np.array_equal(state.s, s)  # noqa: S101
        assert np.array_equal(state.d, d)  # noqa: S101


@pytest.mark.parametrize("seed", range(5))
def test_updated_distances_stay_within_neighbor_range(seed: int) -> None:
    s0, d0 = _instance(seed)
    config = RcpmConfig(k=4, sigma=74.0, iterations=3)

    for state in iterate(s0, d0, config):
        for i in range(d0.shape[0]):
            neighbors = d0[top_k_neighbors(state.s, i, config.k)]
            for m in range(d0.shape[1]):
                if not np.isfinite(state.d[i, m]):
                    continue
                column = neighbors[:, m][np.isfinite(neighbors[:, m])]
                assert column.min() - 1e-9 <= state.d[i, m] <= column.max() + 1e-9  # noqa: S101


def test_standard_affinity_does_not_accumulate_under_fixed_distances() -> None:
    s0, d0 = _instance(5)
    state = _state(s0, d0)

    for variant in RcpmVariant:
        config = RcpmConfig(k=4, variant=variant)
        first = affinity_update(state, config)
        second = affinity_update(replace(state, s=first), config)
        third = affinity_update(replace(state, s=second), config)
        if variant is RcpmVariant.STANDARD:
            assert np.array_equal(first, second)  # noqa: S101
            assert np.array_equal(second, third)  # noqa: S101
        else:
            assert not np.array_equal(first, second)  # noqa: S101


@pytest.mark.parametrize("variant", list(RcpmVariant))
def test_run_is_bit_identical_across_calls(variant: RcpmVariant) -> None:
    s0, d0 = _instance(9)
    config = RcpmConfig(k=4, iterations=5, variant=variant)

    s_a, d_a = run(s0, d0, config)
    s_b, d_b = run(s0.copy(), d0.copy(), config)

    assert s_a.tobytes() == s_b.tobytes()  # noqa: S101
    assert d_a.tobytes() == d_b.tobytes()  # noqa: S101
