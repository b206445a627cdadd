import math

import numpy as np
import pytest

from ergmkit import ingest
from ergmkit.errors import DataError
from ergmkit.graph import Graph


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestReadNetworkMatrix:
    def test_triangle(self, tmp_path):
        p = _write(tmp_path, "k3.txt", "0 1 1\n1 0 1\n1 1 0\n")
        g = ingest.read_network(p, format="adjacency-matrix")
        assert g.n == 3 and g.m == 3

    def test_comma_separated(self, tmp_path):
        p = _write(tmp_path, "m.txt", "0,1\n1,0\n")
        g = ingest.read_network(p)
        assert g.m == 1

    def test_bad_entry_names_position(self, tmp_path):
        p = _write(tmp_path, "m.txt", "0 1 1\n1 0 2\n1 2 0\n")
        with pytest.raises(DataError, match="row 1, column 2"):
            ingest.read_network(p, format="adjacency-matrix")

    def test_non_square_rejected(self, tmp_path):
        p = _write(tmp_path, "m.txt", "0 1\n1 0\n0 1\n")
        with pytest.raises(DataError, match="square"):
            ingest.read_network(p, format="adjacency-matrix")

    def test_asymmetric_symmetrized_with_warning(self, tmp_path):
        p = _write(tmp_path, "m.txt", "0 1 0\n0 0 0\n0 0 0\n")
        with pytest.warns(UserWarning, match="symmetrizing"):
            g = ingest.read_network(p, format="adjacency-matrix")
        assert g.has_edge(0, 1) and g.m == 1

    def test_symmetric_no_warning(self, tmp_path, recwarn):
        p = _write(tmp_path, "m.txt", "0 1\n1 0\n")
        ingest.read_network(p, format="adjacency-matrix")
        assert not [w for w in recwarn if issubclass(w.category, UserWarning)]

    def test_diagonal_rejected(self, tmp_path):
        p = _write(tmp_path, "m.txt", "1 0\n0 0\n")
        with pytest.raises(DataError, match="self-loop"):
            ingest.read_network(p, format="adjacency-matrix")


class TestReadNetworkEdgeList:
    def test_path_graph_with_header(self, tmp_path):
        p = _write(tmp_path, "e.txt", "4\n0 1\n1 2\n")
        g = ingest.read_network(p, format="edge-list")
        assert g.n == 4 and g.m == 2

    def test_comments_ignored(self, tmp_path):
        p = _write(tmp_path, "e.txt", "# comment\n3\n0 1  # trailing\n")
        g = ingest.read_network(p)
        assert g.n == 3 and g.m == 1

    def test_bad_line_reports_number(self, tmp_path):
        p = _write(tmp_path, "e.txt", "3\n0 1\nnope\n")
        with pytest.raises(DataError, match="e.txt:3"):
            ingest.read_network(p, format="edge-list")

    def test_auto_detection(self, tmp_path):
        p = _write(tmp_path, "e.txt", "3\n0 1\n1 2\n")
        assert ingest.read_network(p).m == 2

    def test_round_trip(self, tmp_path):
        g = Graph.from_edges(5, [(0, 1), (1, 4), (2, 3)])
        path = tmp_path / "out.txt"
        ingest.write_network(g, path)
        assert ingest.read_network(str(path)) == g


class TestReadAttributes:
    def test_basic(self, tmp_path):
        p = _write(tmp_path, "a.csv", "node,zone\n0,A\n1,A\n2,B\n3,B\n")
        attrs = ingest.read_attributes(p)
        assert attrs.name == "zone"
        assert attrs.alphabet == ["A", "B"]

    def test_missing_node_listed(self, tmp_path):
        p = _write(tmp_path, "a.csv", "node,zone\n0,A\n1,A\n2,B\n")
        with pytest.raises(DataError, match=r"\[3\]"):
            ingest.read_attributes(p, n=4)

    def test_duplicate_rejected(self, tmp_path):
        p = _write(tmp_path, "a.csv", "node,zone\n0,A\n0,B\n")
        with pytest.raises(DataError, match="duplicate"):
            ingest.read_attributes(p)

    def test_hemisphere_fixture(self, tmp_path):
        rows = "\n".join(f"{i},{'L' if i % 2 == 0 else 'R'}" for i in range(90))
        p = _write(tmp_path, "a.csv", "node,hemisphere\n" + rows + "\n")
        attrs = ingest.read_attributes(p, n=90)
        assert attrs.n == 90
        assert attrs.alphabet == ["L", "R"]


class TestThreshold:
    def _random_weights(self, n, seed):
        rng = np.random.RandomState(seed)
        w = rng.uniform(-1, 1, size=(n, n))
        w = (w + w.T) / 2
        np.fill_diagonal(w, 0.0)
        return ingest.WeightMatrix.from_array(w)

    def test_target_k_for_90_nodes(self):
        w = self._random_weights(90, 1)
        result = ingest.threshold_matrix(w, 2.8)
        assert result.target_k == pytest.approx(90 ** (1 / 2.8), abs=1e-12)
        assert result.target_k == pytest.approx(4.993, abs=0.01)
        # achieved K within one discrete edge step of the target
        step = 2.0 / 90
        assert abs(result.achieved_k - result.target_k) <= step

    def test_constructed_gap(self):
        # five weights far above the rest; target near five edges
        n = 10
        w = np.full((n, n), 0.1)
        np.fill_diagonal(w, 0.0)
        strong = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]
        for i, j in strong:
            w[i, j] = w[j, i] = 0.9
        wm = ingest.WeightMatrix.from_array(w)
        # K* = 1 => 5 edges on 10 nodes
        s = math.log(n) / math.log(1.0000001)
        result = ingest.threshold_matrix(wm, min(s, 1e9))
        assert result.graph.m == 5
        assert {tuple(e) for e in result.graph.edge_list()} == set(strong)

    def test_near_complete_at_small_s(self):
        w = self._random_weights(10, 2)
        result = ingest.threshold_matrix(w, 1.0000001)
        assert result.graph.m >= 40  # K* ~ n: nearly every dyad survives

    def test_monotone_in_s(self):
        w = self._random_weights(40, 3)
        ms = [
            ingest.threshold_matrix(w, s).graph.m
            for s in (1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
        ]
        assert all(a >= b for a, b in zip(ms, ms[1:]))

    def test_constant_matrix_rejected(self):
        w = ingest.WeightMatrix.from_array(np.ones((5, 5)) - np.eye(5))
        with pytest.raises(DataError, match="constant"):
            ingest.threshold_matrix(w, 2.0)

    def test_nan_rejected(self):
        w = np.zeros((5, 5))
        w[0, 1] = w[1, 0] = math.nan
        with pytest.raises(DataError, match="NaN"):
            ingest.WeightMatrix.from_array(w)

    def test_absolute_option(self):
        n = 6
        w = np.zeros((n, n))
        w[0, 1] = w[1, 0] = -0.9
        w[2, 3] = w[3, 2] = 0.5
        w[4, 5] = w[5, 4] = 0.1
        wm = ingest.WeightMatrix.from_array(w)
        raw = ingest.threshold_matrix(wm, 5.0)
        absd = ingest.threshold_matrix(wm, 5.0, absolute=True)
        assert not raw.graph.has_edge(0, 1)
        assert absd.graph.has_edge(0, 1)

    def test_strictly_greater_excludes_threshold_value(self):
        n = 6
        w = np.zeros((n, n))
        vals = {(0, 1): 0.9, (1, 2): 0.5, (2, 3): 0.5, (2, 4): 0.5, (3, 4): 0.2}
        for (i, j), v in vals.items():
            w[i, j] = w[j, i] = v
        wm = ingest.WeightMatrix.from_array(w)
        # K* = 4/3 wants four edges: threshold lands on 0.2, which is excluded
        s = math.log(n) / math.log(4 / 3)
        result = ingest.threshold_matrix(wm, s)
        assert result.threshold == 0.2
        assert result.graph.m == 4
        assert not result.graph.has_edge(3, 4)
        assert result.graph.has_edge(0, 1)

    def test_s_must_exceed_one(self):
        w = self._random_weights(5, 1)
        with pytest.raises(DataError):
            ingest.threshold_matrix(w, 1.0)

    def test_matrix_file_reader(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("0 0.5 0.2\n0.5 0 0.8\n0.2 0.8 0\n")
        w = ingest.read_weight_matrix(str(p))
        assert w.n == 3
        assert w.values[1, 2] == 0.8
