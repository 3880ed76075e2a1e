from __future__ import annotations

import numpy as np
import pytest
from conftest import DummyLogger, make_sequence

from wireless_reid.core.errors import ZeroVectorError
from wireless_reid.core.models import Scenario
from wireless_reid.services.affinity_service import (
    FeatureMetric,
    embedding_distances,
    feature_distances,
    visual_affinity,
)


def _scenario(embeddings: list[tuple[float, ...]]) -> Scenario:
    return Scenario(
        sequences=tuple(
            make_sequence(f"v{i}", "cam0", None, embedding, 0.0)
            for i, embedding in enumerate(embeddings)
        ),
        signals=(),
        queries=(),
        embedding_dim=len(embeddings[0]),
    )


def test_identical_embeddings_have_zero_distance() -> None:
    f = feature_distances(_scenario([(1.0, 2.0)] * 3))

    assert np.array_equal(f, np.zeros((3, 3)))  # noqa: S101


def test_euclidean_three_four_five() -> None:
    f = feature_distances(_scenario([(0.0, 0.0), (3.0, 4.0)]), FeatureMetric.EUCLIDEAN)

    assert f[0, 1] == pytest.approx(5.0, abs=1e-12)  # noqa: S101
    assert f[1, 0] == f[0, 1]  # noqa: S101


@pytest.mark.parametrize("metric", list(FeatureMetric))
def test_random_embeddings_match_brute_force(metric: FeatureMetric) -> None:
    embeddings = np.random.default_rng(5).normal(size=(5, 8))

    f = embedding_distances(embeddings, metric)

    for i in range(5):
        for j in range(5):
            a, b = embeddings[i], embeddings[j]
            if i == j:
                expected = 0.0
            elif metric is FeatureMetric.EUCLIDEAN:
                expected = float(np.sqrt(np.sum((a - b) ** 2)))
            else:
                expected = 1.0 - float(a @ b) / float(np.linalg.norm(a) * np.linalg.norm(b))
            assert abs(f[i, j] - expected) <= 1e-12  # noqa: S101
    assert np.array_equal(f, f.T)  # noqa: S101


def test_cosine_rejects_zero_vector() -> None:
    with pytest.raises(ZeroVectorError):
        embedding_distances(np.array([[0.0, 0.0], [1.0, 0.0]]), FeatureMetric.COSINE)


def test_affinity_row_normalisation() -> None:
    f = np.array([[0.0, 2.0, 4.0], [2.0, 0.0, 1.0], [4.0, 1.0, 0.0]])

    s0 = visual_affinity(f)

    assert s0[0].tolist() == [1.0, 0.5, 0.0]  # noqa: S101
    assert np.array_equal(np.diag(s0), np.ones(3))  # noqa: S101
    for row, source in zip(s0, f, strict=True):
        assert row[np.argmin(source)] == 1.0  # noqa: S101
        assert row[np.argmax(source)] == 0.0  # noqa: S101


def test_affinity_ignores_affine_rescaling() -> None:
    embeddings = np.random.default_rng(9).normal(size=(6, 4))
    f = embedding_distances(embeddings)

    assert np.abs(visual_affinity(3.5 * f + 2.0) - visual_affinity(f)).max() <= 1e-12  # noqa: S101


def test_constant_row_gets_neutral_affinity(logger: DummyLogger) -> None:
    s0 = visual_affinity(np.zeros((3, 3)), logger=logger)

    assert np.array_equal(np.diag(s0), np.ones(3))  # noqa: S101
    assert s0[0, 1] == 0.5  # noqa: S101
    assert len(logger.messages("warning")) == 3  # noqa: S101


@pytest.mark.parametrize("metric", list(FeatureMetric))
def test_affinity_keeps_each_row_in_distance_order(metric: FeatureMetric) -> None:
    embeddings = np.random.default_rng(13).normal(size=(9, 5))
    embeddings[8] = embeddings[7]
    f = embedding_distances(embeddings, metric)

    s0 = visual_affinity(f)

    for i in range(9):
        for j in range(9):
            for k in range(9):
                if f[i, k] - f[i, j] > 1e-9:
                    assert s0[i, j] > s0[i, k]  # noqa: S101
    assert s0[0, 7] == s0[0, 8]  # noqa: S101
