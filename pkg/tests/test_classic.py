import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings

from cumdeg.classic import (
    CentralityError,
    CentralityVector,
    Measure,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
)
from cumdeg.graph import Graph, gen_bucky, gen_complete, gen_cycle, gen_path, gen_star

from .conftest import connected_random, small_graphs
from .oracles import brute_betweenness


class TestDegree:
    def test_complete(self):
        assert list(degree_centrality(gen_complete(3)).scores) == [1.0, 1.0, 1.0]

    def test_star(self):
        s = degree_centrality(gen_star(4)).scores
        assert s[0] == 1.0
        assert s[1:] == pytest.approx([1 / 3] * 3, abs=0)

    def test_path(self):
        assert list(degree_centrality(gen_path(3)).scores) == [0.5, 1.0, 0.5]

    def test_single_node(self):
        with pytest.raises(CentralityError):
            degree_centrality(Graph.from_edges(1, []))

    @given(small_graphs(8))
    @settings(max_examples=60, deadline=None)
    def test_argmax_matches_raw_degree(self, g):
        if g.n < 2:
            return
        assert np.argmax(degree_centrality(g).scores) == np.argmax(g.degrees())


class TestBetweenness:
    def test_complete(self):
        assert list(betweenness_centrality(gen_complete(3)).scores) == [0, 0, 0]

    def test_path3(self):
        assert list(betweenness_centrality(gen_path(3)).scores) == [0.0, 1.0, 0.0]

    def test_path4(self):
        assert list(betweenness_centrality(gen_path(4)).scores) == [0.0, 2.0, 2.0, 0.0]

    def test_ordered_doubles(self):
        g = gen_cycle(5)
        assert np.array_equal(
            betweenness_centrality(g, ordered=True).scores,
            2 * betweenness_centrality(g).scores,
        )

    def test_disconnected_pairs_skipped(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
        assert list(betweenness_centrality(g).scores) == [0, 1, 0, 0, 0]

    @given(small_graphs(8))
    @settings(max_examples=80, deadline=None)
    def test_matches_brute_force(self, g):
        expected = [float(f) for f in brute_betweenness(g)]
        assert list(betweenness_centrality(g).scores) == expected
        assert betweenness_centrality(g, exact=False).scores == pytest.approx(expected, abs=1e-12)


class TestCloseness:
    def test_path(self):
        assert list(closeness_centrality(gen_path(3)).scores) == [1.5, 1.0, 1.5]

    def test_complete(self):
        assert set(closeness_centrality(gen_complete(6)).scores) == {1.0}

    def test_small_component(self):
        g = Graph.from_edges(5, [(0, 1), (2, 3), (3, 4)])
        s = closeness_centrality(g).scores
        assert s[0] == s[1] == 1.0
        assert s[3] == 1.0 and s[2] == 1.5

    def test_isolated_node_sentinel(self):
        g = Graph.from_edges(3, [(0, 1)])
        with pytest.warns(RuntimeWarning, match="isolated"):
            s = closeness_centrality(g).scores
        assert math.isnan(s[2])

    def test_inverse(self):
        v = closeness_centrality(gen_path(3), inverse=True)
        assert v.params["inverse"] == pytest.approx([2 / 3, 1.0, 2 / 3])


class TestEigenvector:
    def test_complete(self):
        v = eigenvector_centrality(gen_complete(3))
        assert v.scores == pytest.approx([1 / math.sqrt(3)] * 3, abs=1e-12)
        assert v.params["eigenvalue"] == pytest.approx(2, abs=1e-12)

    def test_bucky(self):
        v = eigenvector_centrality(gen_bucky())
        assert np.ptp(v.scores) <= 1e-10
        assert v.scores == pytest.approx([1 / math.sqrt(60)] * 60, abs=1e-12)
        assert v.params["eigenvalue"] == pytest.approx(3, abs=1e-10)

    def test_path3(self):
        # A = [[0,1,0],[1,0,1],[0,1,0]]: Perron pair sqrt(2), (1, sqrt2, 1) / 2
        v = eigenvector_centrality(gen_path(3))
        assert v.scores == pytest.approx([0.5, math.sqrt(2) / 2, 0.5], abs=1e-11)
        assert v.params["eigenvalue"] == pytest.approx(math.sqrt(2), abs=1e-11)

    def test_bipartite_star_converges(self):
        v = eigenvector_centrality(gen_star(5))
        assert v.params["eigenvalue"] == pytest.approx(2.0, abs=1e-11)

    def test_disconnected(self):
        with pytest.raises(CentralityError, match="connected"):
            eigenvector_centrality(Graph.from_edges(4, [(0, 1), (2, 3)]))

    def test_non_convergence(self):
        with pytest.raises(CentralityError, match="converge"):
            eigenvector_centrality(gen_random_connected(), max_iter=2)

    @pytest.mark.parametrize("seed", range(6))
    def test_residual_and_norm(self, seed):
        g = connected_random(25, 0.2, seed)
        tol = 1e-12
        v = eigenvector_centrality(g, tol=tol)
        a = g.adjacency_matrix()
        lam = v.params["eigenvalue"]
        assert np.max(np.abs(a @ v.scores - lam * v.scores)) <= 10 * tol
        assert np.linalg.norm(v.scores) == pytest.approx(1, abs=1e-12)
        assert np.all(v.scores >= 0)
        assert lam == pytest.approx(np.max(np.linalg.eigvalsh(a)), abs=1e-10)


def gen_random_connected():
    return connected_random(20, 0.2, 1)


@pytest.mark.parametrize("g", [gen_complete(6), gen_cycle(9), gen_bucky()], ids=["K6", "C9", "bucky"])
def test_vertex_transitive_uniform(g):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for fn in (degree_centrality, betweenness_centrality, closeness_centrality):
            assert len(set(fn(g).scores)) == 1, fn.__name__
    assert np.ptp(eigenvector_centrality(g).scores) <= 1e-10


def test_csv_round_trip():
    v = betweenness_centrality(gen_path(4))
    text = v.to_csv()
    assert text.splitlines()[0] == "node,score"
    back = CentralityVector.from_csv(text, Measure.BETWEENNESS)
    assert np.array_equal(back.scores, v.scores)
    assert '"ordered": false' in v.params_json()
