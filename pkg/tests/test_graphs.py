import numpy as np
import pytest

from locallearn import graphs


class TestGraph:
    def test_edges_and_count(self):
        g = graphs.from_edges(4, [(0, 1), (2, 3), (1, 3)])
        assert g.num_edges == 3
        assert g.edges() == [(0, 1), (1, 3), (2, 3)]
        assert g.has_edge(3, 1) and not g.has_edge(0, 3)

    def test_validation(self):
        with pytest.raises(ValueError):
            graphs.from_edges(3, [(0, 0)])
        with pytest.raises(ValueError):
            graphs.from_edges(3, [(0, 5)])
        with pytest.raises(ValueError):
            graphs.Graph(2, np.array([[False, True], [False, False]]))
        with pytest.raises(ValueError):
            graphs.Graph(2, np.array([[True, False], [False, False]]))


class TestFileFormat:
    def test_roundtrip(self, tmp_path):
        g = graphs.from_edges(5, [(0, 4), (1, 2), (2, 3)])
        path = tmp_path / "g.txt"
        graphs.write_graph(g, path)
        assert path.read_text().splitlines()[0] == "5 3"
        back = graphs.read_graph(path)
        assert back.n == 5 and back.edges() == g.edges()

    def test_duplicate_edges_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2\n0 1\n1 0\n")
        with pytest.raises(ValueError):
            graphs.read_graph(path)
