import numpy as np
import pytest

from fitrecon.ensemble import FitnessEnsemble, sample
from fitrecon.errors import IngestError
from fitrecon.graph import FitnessVector, binarize
from fitrecon.io import (
    ingest_degrees,
    ingest_edge_list,
    ingest_fitness,
    write_edge_list,
    write_fitness,
)


@pytest.fixture
def write(tmp_path):
    def _write(text, name="f.csv"):
        path = tmp_path / name
        path.write_bytes(text.encode("utf-8"))
        return path

    return _write


class TestEdgeList:
    def test_basic(self, write):
        g = ingest_edge_list(write("src,dst,weight\na,b,5\nb,a,3\n"))
        assert g.labels == ("a", "b")
        assert g.weights.tolist() == [[0, 5], [3, 0]]

    def test_duplicates_summed(self, write):
        g = ingest_edge_list(write("src,dst,weight\na,b,1\na,b,2\n"))
        assert g.weights[0, 1] == 3

    def test_first_appearance_order(self, write):
        g = ingest_edge_list(write("src,dst,weight\nx,y,1\nz,y,2\ny,x,0.5\n"))
        # z only ever appears as a source but is still a node
        assert g.labels == ("x", "y", "z")
        assert g.n == 3
        assert g.weights[2, 1] == 2

    @pytest.mark.parametrize(
        "text, line",
        [
            ("src,dst,weight\na,b,-1\n", 2),
            ("src,dst,weight\na,b,1\na,b\n", 3),
            ("src,dst,weight\na,b,abc\n", 2),
            ("src,dst,weight\na,b,nan\n", 2),
            ("", 1),
            ("source,target,w\na,b,1\n", 1),
            ("src,dst,weight\n", 2),
        ],
    )
    def test_rejections_carry_line(self, write, text, line):
        with pytest.raises(IngestError) as info:
            ingest_edge_list(write(text))
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_written_file_uses_lf_and_declares_isolated_nodes(self):
        y = np.random.default_rng(0).lognormal(0, 1, 25)
        g = sample(FitnessEnsemble(y, 0.05), 3)
        assert (g.degrees == 0).any()
        labels = [f"n{i}" for i in range(25)]
        text = write_edge_list(g, labels)
        assert "\r" not in text
        assert text.count("\n") == 1 + 25 + g.n_edges

    def test_round_trip_file(self, write):
        y = np.random.default_rng(1).lognormal(0, 1, 30)
        g = sample(FitnessEnsemble(y, 0.05), 5)
        labels = [f"node-{i}" for i in range(30)]
        back = ingest_edge_list(write(write_edge_list(g, labels)))
        assert back.labels == tuple(labels)
        assert binarize(back) == g


class TestFitness:
    def test_round_trip(self, write):
        y = FitnessVector([1.5, 0.1, 1e-300, 7e22], ("a", "b", "c", "d"))
        back = ingest_fitness(write(write_fitness(y)))
        assert back.labels == y.labels
        assert back.values.tolist() == y.values.tolist()

    def test_nonpositive_rejected(self, write):
        with pytest.raises(IngestError, match="nonpositive"):
            ingest_fitness(write("node,fitness\na,1\nb,0\n"))

    def test_duplicate_rejected(self, write):
        with pytest.raises(IngestError, match="duplicate"):
            ingest_fitness(write("node,fitness\na,1\na,2\n"))

    def test_node_set_mismatch_lists_difference(self, write):
        path = write("node,fitness\na,1\nb,2\nq,3\n")
        with pytest.raises(IngestError) as info:
            ingest_fitness(path, nodes=("a", "b", "c"))
        msg = str(info.value)
        assert "missing from fitness file: ['c']" in msg
        assert "not in graph: ['q']" in msg

    def test_reordered_to_graph(self, write):
        y = ingest_fitness(write("node,fitness\nb,2\na,1\n"), nodes=("a", "b"))
        assert y.values.tolist() == [1, 2]


class TestDegrees:
    def test_indexes_by_label(self, write):
        obs = ingest_degrees(write("node,degree\nc,2\na,1\n"), ("a", "b", "c"))
        assert obs.subset.tolist() == [2, 0]
        assert obs.observed_degrees.tolist() == [2, 1]

    def test_unknown_node(self, write):
        with pytest.raises(IngestError, match="without fitness"):
            ingest_degrees(write("node,degree\nz,2\n"), ("a", "b"))

    def test_negative(self, write):
        with pytest.raises(IngestError, match="negative"):
            ingest_degrees(write("node,degree\na,-2\n"), ("a", "b"))
