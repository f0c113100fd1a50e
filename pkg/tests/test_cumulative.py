import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cumdeg.classic import Measure
from cumdeg.cumulative import (
    CumulativeParams,
    Mode,
    cd_vector_all,
    cumulative_degree,
    cumulative_degree_n,
    discounted_dcd,
    distributed_cumulative_degree,
)
from cumdeg.graph import Graph, GraphError, bfs_layers, gen_bucky, gen_complete, gen_path, gen_star

from .conftest import connected_random, small_graphs
from .oracles import walk_sum

WALK = Mode.WALK
TREE = Mode.TREE


def p(n, mode=WALK, **kw):
    return CumulativeParams(layer_n=n, mode=mode, **kw)


class TestCD:
    def test_complete(self):
        assert [cumulative_degree(gen_complete(3), m) for m in range(3)] == [4, 4, 4]

    def test_star_hub_and_leaf_tie(self):
        s4 = gen_star(4)
        assert cumulative_degree(s4, 0) == 3
        assert all(cumulative_degree(s4, m) == 3 for m in (1, 2, 3))

    def test_path(self):
        g = gen_path(3)
        assert cumulative_degree(g, 1) == 2
        assert cumulative_degree(g, 0) == 2

    def test_unknown_node(self):
        with pytest.raises(GraphError):
            cumulative_degree(gen_path(3), 9)


class TestCDn:
    def test_star_walk(self):
        # d = (3,1,1,1); A d = (3,3,3,3); A^2 d = (9,3,3,3)
        s4 = gen_star(4)
        assert cumulative_degree_n(s4, 0, p(2)) == 9
        assert cumulative_degree_n(s4, 1, p(2)) == 3
        assert list(cd_vector_all(s4, p(2)).scores) == [9, 3, 3, 3]

    def test_star_tree(self):
        s4 = gen_star(4)
        assert cumulative_degree_n(s4, 0, p(2, TREE)) == 3
        assert cumulative_degree_n(s4, 1, p(2, TREE)) == 5

    def test_layer_zero_rejected(self):
        with pytest.raises(GraphError):
            cumulative_degree_n(gen_path(3), 0, p(0))
        with pytest.raises(GraphError):
            cd_vector_all(gen_path(3), p(0))

    def test_lazy_star(self):
        # (A+I) d = (6,4,4,4); (A+I)^2 d = (18, 10, 10, 10)
        assert list(cd_vector_all(gen_star(4), p(2, lazy=True)).scores) == [18, 10, 10, 10]

    def test_lazy_tree_rejected(self):
        with pytest.raises(GraphError):
            CumulativeParams(2, TREE, lazy=True)

    @given(small_graphs(8))
    @settings(max_examples=60, deadline=None)
    def test_one_layer_is_cd(self, g):
        cd = [cumulative_degree(g, m) for m in range(g.n)]
        for mode in (WALK, TREE):
            assert list(cd_vector_all(g, p(1, mode)).scores) == cd
        assert list(cd_vector_all(g, p(1), Measure.CD).scores) == cd

    @given(small_graphs(7), st.integers(1, 4))
    @settings(max_examples=80, deadline=None)
    def test_walk_matches_enumeration(self, g, n):
        got = cd_vector_all(g, p(n)).scores
        assert [int(x) for x in got] == [walk_sum(g, m, n) for m in range(g.n)]
        assert list(got) == [cumulative_degree_n(g, m, p(n)) for m in range(g.n)]

    @given(small_graphs(8), st.integers(2, 8), st.booleans())
    @settings(max_examples=60, deadline=None)
    def test_recursion(self, g, n, lazy):
        a = g.adjacency_matrix()
        if lazy:
            a += np.eye(g.n)
        prev = cd_vector_all(g, p(n - 1, lazy=lazy)).scores
        assert np.array_equal(cd_vector_all(g, p(n, lazy=lazy)).scores, a @ prev)

    def test_bucky_uniform_powers(self):
        g = gen_bucky()
        for n in range(1, 8):
            assert set(cd_vector_all(g, p(n)).scores) == {3.0 ** n * 3}

    @given(small_graphs(8), st.permutations(range(8)))
    @settings(max_examples=60, deadline=None)
    def test_tree_mode_relabel_invariant(self, g, perm):
        perm = [x for x in perm if x < g.n]
        h = Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])
        a = cd_vector_all(g, p(3, TREE)).scores
        b = cd_vector_all(h, p(3, TREE)).scores
        assert all(a[m] == b[perm[m]] for m in range(g.n))


class TestDCD:
    def test_path(self):
        assert distributed_cumulative_degree(gen_path(3), 0) == 3

    def test_complete(self):
        assert distributed_cumulative_degree(gen_complete(3), 1) == 4

    def test_include_self_is_total(self):
        g = connected_random(15, 0.25, 3)
        totals = {distributed_cumulative_degree(g, m, include_self=True) for m in range(g.n)}
        assert totals == {2 * g.edge_count}

    def test_walk_rejected(self):
        with pytest.raises(GraphError, match="walk"):
            distributed_cumulative_degree(gen_path(3), 0, WALK)

    def test_vector(self):
        v = cd_vector_all(gen_path(3), p(1, TREE), Measure.DCD)
        assert list(v.scores) == [3, 2, 3]


class TestD2CD:
    def test_single_layer(self):
        assert discounted_dcd(gen_path(3), 1, p(1, TREE, discounts=(1,))) == 2

    def test_two_layers(self):
        assert discounted_dcd(gen_path(3), 0, p(2, TREE, discounts=(1, 0.5))) == 2.5

    def test_zero_discounts(self):
        g = connected_random(10, 0.3, 0)
        for mode in (WALK, TREE):
            v = cd_vector_all(g, p(3, mode, discounts=(0, 0, 0)), Measure.D2CD)
            assert not v.scores.any()

    def test_empty_or_mismatched_discounts(self):
        with pytest.raises(GraphError):
            discounted_dcd(gen_path(3), 0, p(2, TREE))
        with pytest.raises(GraphError):
            discounted_dcd(gen_path(3), 0, p(2, TREE, discounts=(1,)))

    def test_negative_discount(self):
        with pytest.raises(GraphError):
            p(1, TREE, discounts=(-1,))

    def test_walk_layers(self):
        # layer k is (A^k d)_m
        g = gen_star(4)
        assert discounted_dcd(g, 0, p(2, discounts=(1, 0.5))) == 3 + 0.5 * 9

    @given(small_graphs(8))
    @settings(max_examples=60, deadline=None)
    def test_unit_discounts_full_depth_is_dcd(self, g):
        for m in range(g.n):
            depth = max(bfs_layers(g, m).depth, 1)
            d2 = discounted_dcd(g, m, p(depth, TREE, discounts=(1,) * depth))
            assert d2 == distributed_cumulative_degree(g, m)
            d2s = discounted_dcd(g, m, p(depth, TREE, discounts=(1,) * depth, include_self=True))
            assert d2s == distributed_cumulative_degree(g, m, include_self=True)


def test_params_recorded():
    v = cd_vector_all(gen_path(3), p(2, lazy=True))
    assert v.params == {
        "layer_n": 2,
        "mode": "walk",
        "lazy": True,
        "discounts": [],
        "include_self": False,
    }
