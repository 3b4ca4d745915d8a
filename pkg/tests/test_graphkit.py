from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import cdist

from gsrcpd.errors import DimensionMismatchError, WindowSizeError
from gsrcpd.graphkit import (
    GraphKind,
    ObservationWindow,
    UnionFind,
    adjacency_indicator,
    build_graph,
    distances_to,
    gap_spanning,
    graph_edges,
    pairwise_sq_distances,
    reference_points,
    require_scanning_window,
    spanning_profile,
    spanning_triplet,
    spanning_weight,
    squared_distance,
)

# Four collinear points: nearest neighbours chain 0-1-2-3.
LINE = np.array([[0.0], [1.0], [3.0], [10.0]])


def test_graph_kind_parse_accepts_aliases() -> None:
    assert GraphKind.parse("complete") is GraphKind.CG
    assert GraphKind.parse(" MST ") is GraphKind.MST
    assert GraphKind.parse(GraphKind.NNG) is GraphKind.NNG
    with pytest.raises(ValueError):
        GraphKind.parse("knn")


def test_window_validates_shape_and_values() -> None:
    window = ObservationWindow([1.0, 2.0, 3.0, 4.0], anchor=7)
    assert window.size == 4
    assert window.dimension == 1
    assert window.anchor == 7
    assert not window.observations.flags.writeable

    with pytest.raises(WindowSizeError):
        ObservationWindow([[1.0, 2.0]])
    with pytest.raises(DimensionMismatchError):
        ObservationWindow(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        ObservationWindow([[0.0], [np.nan]])


def test_window_half_requires_even_length() -> None:
    assert ObservationWindow(np.zeros((8, 1))).half == 4
    with pytest.raises(WindowSizeError):
        ObservationWindow(np.zeros((7, 1))).half
    with pytest.raises(WindowSizeError):
        require_scanning_window(2)


def test_block_keeps_stream_anchor() -> None:
    window = ObservationWindow(np.arange(8.0), anchor=100)
    block = window.block(2, 6)
    assert block.anchor == 102
    np.testing.assert_array_equal(block.observations.ravel(), [2.0, 3.0, 4.0, 5.0])


def test_reference_points_cover_two_to_two_n_minus_two() -> None:
    assert list(reference_points(4)) == [2, 3, 4, 5, 6]


def test_squared_distance_and_dimension_check() -> None:
    assert squared_distance([0.0, 0.0], [3.0, 4.0]) == 25.0
    with pytest.raises(DimensionMismatchError):
        squared_distance([0.0, 0.0], [1.0])


def test_pairwise_matches_scipy(rng: np.random.Generator) -> None:
    points = rng.standard_normal((9, 4))
    np.testing.assert_allclose(pairwise_sq_distances(points), cdist(points, points, "sqeuclidean"), rtol=1e-12, atol=1e-12)


def test_distances_to_matches_pairwise_columns_exactly(rng: np.random.Generator) -> None:
    points = rng.standard_normal((7, 5)) * 100.0
    dist = pairwise_sq_distances(points)
    for j in range(points.shape[0]):
        assert np.array_equal(distances_to(points, points[j]), dist[:, j])


def test_pairwise_rejects_overflow() -> None:
    with pytest.raises(ValueError):
        pairwise_sq_distances([[0.0], [1e200]])


def test_line_graphs_by_hand() -> None:
    dist = pairwise_sq_distances(LINE)
    assert spanning_weight(dist, GraphKind.CG) == 1 + 9 + 100 + 4 + 81 + 49
    assert [(i, j) for i, j, _ in graph_edges(dist, GraphKind.MST)] == [(0, 1), (1, 2), (2, 3)]
    assert spanning_weight(dist, GraphKind.MST) == 54.0
    assert [(i, j) for i, j, _ in graph_edges(dist, GraphKind.NNG)] == [(0, 1), (1, 2), (2, 3)]
    assert spanning_weight(dist, GraphKind.NNG) == 54.0


def test_nng_drops_duplicate_mutual_pairs() -> None:
    dist = pairwise_sq_distances([[0.0], [1.0], [10.0], [11.0]])
    assert [(i, j) for i, j, _ in graph_edges(dist, GraphKind.NNG)] == [(0, 1), (2, 3)]


def test_mst_weight_matches_scipy(rng: np.random.Generator) -> None:
    points = rng.standard_normal((15, 3))
    dist = pairwise_sq_distances(points)
    expected = minimum_spanning_tree(dist).sum()
    assert spanning_weight(dist, GraphKind.MST) == pytest.approx(expected, rel=1e-12)
    assert len(graph_edges(dist, GraphKind.MST)) == 14


def test_graph_needs_two_nodes() -> None:
    with pytest.raises(WindowSizeError):
        graph_edges(np.zeros((1, 1)), GraphKind.MST)


def test_build_graph_and_adjacency_indicator() -> None:
    window = ObservationWindow(LINE)
    complete = build_graph(window, "cg")
    assert complete.edge_count == 6
    np.testing.assert_array_equal(adjacency_indicator(complete, 4), np.ones(6))

    tree = build_graph(window, GraphKind.MST)
    # Upper-triangular order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
    np.testing.assert_array_equal(adjacency_indicator(tree, 4), [1, 0, 0, 1, 0, 1])
    assert tree.weight == 54.0


def test_union_find_merges_once() -> None:
    forest = UnionFind(4)
    assert forest.union(0, 1)
    assert forest.union(2, 3)
    assert not forest.union(1, 0)
    assert forest.union(1, 3)
    assert forest.find(0) == forest.find(2)


def test_cg_total_splits_into_blocks_and_gap(gaussian_window: ObservationWindow) -> None:
    for k in reference_points(gaussian_window.half):
        wl, wr, total = spanning_triplet(gaussian_window, k, GraphKind.CG)
        assert total == pytest.approx(wl + wr + gap_spanning(gaussian_window, k), rel=1e-12)


def test_spanning_triplet_rejects_out_of_range_k(gaussian_window: ObservationWindow) -> None:
    with pytest.raises(ValueError):
        spanning_triplet(gaussian_window, 1, GraphKind.CG)
    with pytest.raises(ValueError):
        spanning_triplet(gaussian_window, 11, GraphKind.CG)


@pytest.mark.parametrize("kind", list(GraphKind))
def test_profile_matches_direct_block_weights(gaussian_window: ObservationWindow, kind: GraphKind) -> None:
    dist = pairwise_sq_distances(gaussian_window.observations)
    weights = spanning_profile(dist, kind)
    assert weights.ks.tolist() == list(reference_points(6))
    for index, k in enumerate(weights.ks.tolist()):
        wl, wr, total = spanning_triplet(gaussian_window, k, kind)
        assert weights.left[index] == pytest.approx(wl, rel=1e-12)
        assert weights.right[index] == pytest.approx(wr, rel=1e-12)
        assert weights.total == pytest.approx(total, rel=1e-12)


def test_profile_subset_of_ks(gaussian_window: ObservationWindow) -> None:
    dist = pairwise_sq_distances(gaussian_window.observations)
    full = spanning_profile(dist, GraphKind.MST)
    subset = spanning_profile(dist, GraphKind.MST, ks=[6, 3, 6])
    assert subset.ks.tolist() == [3, 6]
    assert subset.left.tolist() == [full.left[1], full.left[4]]
    with pytest.raises(ValueError):
        spanning_profile(dist, GraphKind.MST, ks=[11])


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (8, 2), elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_cg_prefix_sums_agree_with_blocks(points: np.ndarray) -> None:
    dist = pairwise_sq_distances(points)
    weights = spanning_profile(dist, GraphKind.CG)
    for index, k in enumerate(weights.ks.tolist()):
        left = spanning_weight(dist[:k, :k], GraphKind.CG)
        right = spanning_weight(dist[k:, k:], GraphKind.CG)
        assert weights.left[index] == pytest.approx(left, rel=1e-9, abs=1e-6)
        assert weights.right[index] == pytest.approx(right, rel=1e-9, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(
    arrays(
        np.float64,
        st.tuples(st.integers(2, 9), st.integers(1, 4)),
        elements=st.floats(-1e3, 1e3, allow_nan=False),
    )
)
def test_tree_and_neighbour_weights_never_exceed_complete_graph(points: np.ndarray) -> None:
    dist = pairwise_sq_distances(points)
    complete = spanning_weight(dist, GraphKind.CG)
    assert spanning_weight(dist, GraphKind.MST) <= complete * (1 + 1e-12)
    assert spanning_weight(dist, GraphKind.NNG) <= complete * (1 + 1e-12)
