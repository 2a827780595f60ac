import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgwmixup.graphs import (
    Graph,
    build_graph,
    degree_feature_augmentation,
    degree_measure,
    feature_distance_matrix,
    remove_isolated_nodes,
    uniform_measure,
)

PATH3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
K3 = np.ones((3, 3)) - np.eye(3)
STAR4 = np.zeros((4, 4))
STAR4[0, 1:] = 1.0
STAR4[1:, 0] = 1.0


def test_build_graph_single_node():
    g = build_graph([1.0], [[2.0]], [[0.0]])
    assert g.num_nodes == 1
    assert g.mu[0] == 1.0


def test_build_graph_two_nodes():
    g = build_graph([0.5, 0.5], np.ones((2, 1)), [[0, 1], [1, 0]])
    assert g.num_nodes == 2
    assert g.structure[0, 1] == 1.0


def test_build_graph_rejects_bad_measure_sum():
    with pytest.raises(ValueError, match="sums to"):
        build_graph([0.6, 0.6], np.ones((2, 1)), [[0, 1], [1, 0]])


def test_build_graph_rejects_negative_measure():
    with pytest.raises(ValueError, match="negative"):
        build_graph([1.2, -0.2], np.ones((2, 1)), [[0, 1], [1, 0]])


def test_build_graph_rejects_asymmetric_structure():
    with pytest.raises(ValueError, match="symmetric"):
        build_graph([0.5, 0.5], np.ones((2, 1)), [[0, 1], [0, 0]])


def test_build_graph_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        build_graph([0.5, 0.5], np.ones((3, 1)), [[0, 1], [1, 0]])


def test_build_graph_renormalizes_small_deviation():
    g = build_graph([0.5 + 4e-10, 0.5], np.ones((2, 1)), np.zeros((2, 2)) + PATH3[:2, :2])
    assert abs(g.mu.sum() - 1.0) <= 1e-12


def test_graph_arrays_are_readonly():
    g = build_graph([0.5, 0.5], np.ones((2, 1)), [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        g.mu[0] = 0.2


def test_uniform_measure_quarter():
    assert np.array_equal(uniform_measure(4), [0.25, 0.25, 0.25, 0.25])


def test_uniform_measure_single():
    assert np.array_equal(uniform_measure(1), [1.0])


def test_uniform_measure_exact_sum():
    mu = uniform_measure(3)
    assert np.allclose(mu, 1 / 3)
    assert mu.sum() == 1.0


def test_uniform_measure_rejects_zero():
    with pytest.raises(ValueError):
        uniform_measure(0)


def test_degree_measure_path():
    assert np.allclose(degree_measure(PATH3), [0.25, 0.5, 0.25])


def test_degree_measure_complete_graph_is_uniform():
    assert np.allclose(degree_measure(K3), uniform_measure(3))


def test_degree_measure_star():
    assert np.allclose(degree_measure(STAR4), [0.5, 1 / 6, 1 / 6, 1 / 6])


def test_degree_measure_rejects_empty_structure():
    with pytest.raises(ValueError, match="no edges"):
        degree_measure(np.zeros((3, 3)))


def test_feature_distance_scalar():
    g1 = build_graph([1.0], [[0.0]], [[0.0]])
    g2 = build_graph([1.0], [[3.0]], [[0.0]])
    D = feature_distance_matrix(g1, g2, 2.0)
    assert D.shape == (1, 1)
    assert D[0, 0] == pytest.approx(9.0)


def test_feature_distance_zero_diagonal_and_symmetry():
    rng = np.random.default_rng(3)
    g = build_graph(uniform_measure(4), rng.standard_normal((4, 2)), np.zeros((4, 4)))
    D = feature_distance_matrix(g, g)
    assert np.allclose(np.diag(D), 0.0)
    assert np.allclose(D, D.T)


def test_feature_distance_matches_brute_force():
    rng = np.random.default_rng(5)
    g1 = build_graph(uniform_measure(3), rng.standard_normal((3, 2)), np.zeros((3, 3)))
    g2 = build_graph(uniform_measure(4), rng.standard_normal((4, 2)), np.zeros((4, 4)))
    D = feature_distance_matrix(g1, g2, 2.0)
    for i in range(3):
        for j in range(4):
            expected = np.sum((g1.features[i] - g2.features[j]) ** 2)
            assert D[i, j] == pytest.approx(expected, abs=1e-12)


def test_feature_distance_rejects_dim_mismatch():
    g1 = build_graph([1.0], [[0.0, 0.0]], [[0.0]])
    g2 = build_graph([1.0], [[3.0]], [[0.0]])
    with pytest.raises(ValueError, match="dimensions differ"):
        feature_distance_matrix(g1, g2)


def _k3_plus_isolated():
    structure = np.zeros((4, 4))
    structure[:3, :3] = K3
    return build_graph(uniform_measure(4), np.ones((4, 1)), structure)


def test_remove_isolated_nodes_drops_edgeless_node():
    trimmed = remove_isolated_nodes(_k3_plus_isolated())
    assert trimmed.num_nodes == 3
    assert np.array_equal(trimmed.structure, K3)
    assert np.allclose(trimmed.mu, 1 / 3)


def test_remove_isolated_nodes_identity_on_clean_graph():
    g = build_graph(uniform_measure(3), np.ones((3, 1)), K3)
    assert remove_isolated_nodes(g) is g


def test_remove_isolated_nodes_two_removed():
    structure = np.zeros((5, 5))
    structure[:3, :3] = K3
    g = build_graph(uniform_measure(5), np.arange(5.0).reshape(5, 1), structure)
    trimmed = remove_isolated_nodes(g)
    assert trimmed.num_nodes == 3
    assert np.allclose(trimmed.mu, [1 / 3] * 3)
    assert np.array_equal(trimmed.features.ravel(), [0.0, 1.0, 2.0])


def test_remove_isolated_nodes_rejects_fully_isolated():
    g = build_graph(uniform_measure(2), np.ones((2, 1)), np.zeros((2, 2)))
    with pytest.raises(ValueError, match="isolated"):
        remove_isolated_nodes(g)


def test_remove_isolated_nodes_idempotent():
    trimmed = remove_isolated_nodes(_k3_plus_isolated())
    assert remove_isolated_nodes(trimmed) is trimmed


def _featureless(structure):
    n = structure.shape[0]
    return build_graph(uniform_measure(n), np.zeros((n, 0)), structure)


def test_degree_features_path():
    g = degree_feature_augmentation(_featureless(PATH3), max_degree=3)
    expected = np.zeros((3, 4))
    expected[0, 1] = expected[2, 1] = expected[1, 2] = 1.0
    assert np.array_equal(g.features, expected)


def test_degree_features_clamp():
    structure = np.zeros((8, 8))
    structure[0, 1:] = 1.0
    structure[1:, 0] = 1.0
    g = degree_feature_augmentation(_featureless(structure), max_degree=3)
    assert g.features[0, 3] == 1.0  # degree 7 clamps to the last bucket
    assert g.features[0].sum() == 1.0


def test_degree_features_complete_graph():
    g = degree_feature_augmentation(_featureless(np.ones((4, 4)) - np.eye(4)), max_degree=5)
    assert np.all(g.features[:, 3] == 1.0)


def test_degree_features_refuse_overwrite():
    g = build_graph(uniform_measure(3), np.ones((3, 2)), PATH3)
    with pytest.raises(ValueError, match="force"):
        degree_feature_augmentation(g)
    forced = degree_feature_augmentation(g, max_degree=2, force=True)
    assert forced.feature_dim == 3


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=10_000))
def test_constructed_graph_invariants(n, seed):
    rng = np.random.default_rng(seed)
    raw = rng.random(n) + 0.05
    mu = raw / raw.sum()
    upper = np.triu(rng.random((n, n)) < 0.5, 1)
    structure = (upper | upper.T).astype(float)
    g = build_graph(mu, rng.standard_normal((n, 2)), structure)
    assert abs(g.mu.sum() - 1.0) <= 1e-12
    assert np.array_equal(g.structure, g.structure.T)
    assert g.features.shape[0] == g.mu.shape[0] == g.structure.shape[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=10_000))
def test_remove_isolated_idempotent_property(n, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < 0.3, 1)
    structure = (upper | upper.T).astype(float)
    if structure.sum() == 0:
        structure[0, 1] = structure[1, 0] = 1.0
    g = build_graph(uniform_measure(n), rng.standard_normal((n, 1)), structure)
    once = remove_isolated_nodes(g)
    assert remove_isolated_nodes(once) is once
