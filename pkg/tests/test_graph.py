import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fitrecon.errors import ReconstructionError
from fitrecon.graph import FitnessVector, Graph, WeightedDigraph, binarize, degrees, strengths


def weights_strategy(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(
            float,
            (n, n),
            elements=st.one_of(st.just(0.0), st.floats(0, 1e6, allow_nan=False, allow_infinity=False)),
        )
    )


def test_binarize_single_directed_flow():
    g = binarize(WeightedDigraph([[0, 5.0], [0, 0]]))
    assert g.adjacency.tolist() == [[0, 1], [1, 0]]


def test_binarize_all_zero_is_empty():
    g = binarize(WeightedDigraph(np.zeros((4, 4))))
    assert g.n_edges == 0


def test_binarize_path():
    w = np.zeros((3, 3))
    w[0, 1], w[1, 2] = 1, 2
    g = binarize(WeightedDigraph(w))
    assert g.edges() == [(0, 1), (1, 2)]
    assert degrees(g).tolist() == [1, 2, 1]


def test_binarize_ignores_diagonal():
    g = binarize(WeightedDigraph([[7.0, 0], [0, 3.0]]))
    assert g.n_edges == 0


def test_negative_weight_rejected():
    with pytest.raises(ReconstructionError, match="negative"):
        WeightedDigraph([[0, -1.0], [0, 0]])


@given(weights_strategy())
def test_binarize_symmetric_zero_diagonal(w):
    a = binarize(WeightedDigraph(w)).adjacency
    assert np.array_equal(a, a.T)
    assert not np.diag(a).any()


@given(weights_strategy())
def test_binarize_transpose_invariant(w):
    assert binarize(WeightedDigraph(w)) == binarize(WeightedDigraph(w.T))


@given(weights_strategy())
def test_degree_sum_is_twice_edges(w):
    g = binarize(WeightedDigraph(w))
    assert g.degrees.sum() == 2 * g.n_edges
    assert np.all((0 <= g.degrees) & (g.degrees <= g.n - 1))


@pytest.mark.parametrize(
    "w, expected",
    [
        ([[0, 5], [3, 0]], [5, 3]),
        ([[0, 1, 2], [4, 0, 0], [1, 1, 0]], [3, 4, 2]),
    ],
)
def test_strengths_row_sums(w, expected):
    assert strengths(WeightedDigraph(w)).values.tolist() == expected


def test_strengths_uniform():
    c = 2.5
    w = np.full((4, 4), c)
    assert np.allclose(strengths(WeightedDigraph(w)).values, 3 * c)


def test_total_strength_adds_columns():
    y = strengths(WeightedDigraph([[0, 5], [3, 0]]), kind="total")
    assert y.values.tolist() == [8, 8]


def test_zero_strength_names_node():
    w = WeightedDigraph([[0, 1, 0], [1, 0, 0], [0, 0, 0]], labels=("a", "b", "c"))
    with pytest.raises(ReconstructionError, match="'c'"):
        strengths(w)


def test_degrees_complete_and_empty():
    k4 = Graph(np.ones((4, 4), dtype=int) - np.eye(4, dtype=int))
    assert degrees(k4).tolist() == [3, 3, 3, 3]
    assert degrees(Graph(np.zeros((3, 3), dtype=int))).tolist() == [0, 0, 0]


@pytest.mark.parametrize(
    "a",
    [
        [[0, 1], [0, 0]],  # asymmetric
        [[1, 0], [0, 0]],  # self-loop
        [[0, 2], [2, 0]],  # not binary
    ],
)
def test_graph_rejects_invalid(a):
    with pytest.raises(ReconstructionError):
        Graph(np.array(a))


def test_graph_is_immutable():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.adjacency[0, 2] = 1


def test_fitness_rejects_nonpositive():
    with pytest.raises(ReconstructionError, match="prune"):
        FitnessVector([1.0, 0.0, 2.0])
    assert np.asarray(FitnessVector([1.0, 2.0])).tolist() == [1.0, 2.0]
