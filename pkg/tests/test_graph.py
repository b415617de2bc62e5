import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import seeded_graphs
from wvcp.coloring import check_coloring, coloring_score
from wvcp.generators import random_graph
from wvcp.graph import (
    RULE_CLIQUE,
    RULE_DOMINATED,
    InstanceError,
    RawGraph,
    build_graph,
    find_cliques,
    from_edges,
    load_instance,
    parse_col,
    parse_weights,
    reduce_graph,
    restore_solution,
    save_instance,
    serialize_col,
    serialize_weights,
    vertex_order,
)
from wvcp.oracle import exact_optimum


class TestParseCol:
    def test_simple(self):
        raw = parse_col("p edge 3 2\ne 1 2\ne 2 3")
        assert raw.n == 3
        assert set(raw.edges) == {(0, 1), (1, 2)}

    def test_duplicates_collapse(self):
        raw = parse_col("c hi\np edge 2 1\ne 1 2\ne 2 1")
        assert raw.n == 2
        assert raw.edges == ((0, 1),)

    def test_out_of_range(self):
        with pytest.raises(InstanceError, match="endpoint out of range, line 2"):
            parse_col("p edge 2 1\ne 1 3")

    @pytest.mark.parametrize(
        "text, msg",
        [
            ("e 1 2", "edge before p line, line 1"),
            ("c nothing here", "missing p line"),
            ("p edge 2 1\np edge 2 1", "duplicate p line, line 2"),
            ("p edge 2 1\ne 1 1", "self-loop, line 2"),
            ("p edge 2 1\ne 1 x", "non-integer token 'x', line 2"),
            ("p edge two 1", "non-integer token 'two', line 1"),
        ],
    )
    def test_errors(self, text, msg):
        with pytest.raises(InstanceError, match=msg):
            parse_col(text)


class TestParseWeights:
    def test_simple(self):
        assert parse_weights("5\n3\n2", 3) == [5, 3, 2]

    def test_trailing_newline(self):
        assert parse_weights("5\n3\n2\n", 3) == [5, 3, 2]

    def test_too_few(self):
        with pytest.raises(InstanceError, match="expected 3 weights, got 2"):
            parse_weights("5\n3", 3)

    def test_non_positive(self):
        with pytest.raises(InstanceError, match="non-positive weight at line 1"):
            parse_weights("0\n1\n1", 3)

    def test_non_integer(self):
        with pytest.raises(InstanceError, match="non-integer weight at line 2"):
            parse_weights("1\n1.5\n1", 3)


class TestBuildGraph:
    def test_triangle_degrees(self):
        g = build_graph(RawGraph(3, ((0, 1), (1, 2), (0, 2))), [5, 3, 2])
        assert g.degrees == [2, 2, 2]
        assert g.adj[0] == {1, 2}

    def test_empty_edges(self):
        g = build_graph(RawGraph(4, ()), [1, 1, 1, 1])
        assert g.degrees == [0, 0, 0, 0]

    def test_weight_count_mismatch(self):
        with pytest.raises(InstanceError):
            build_graph(RawGraph(3, ()), [1, 2])

    def test_symmetric_masks(self):
        g = random_graph(15, 0.4, random.Random(3))
        for u in range(g.n):
            for v in range(g.n):
                assert (v in g.adj[u]) == (u in g.adj[v]) == bool(g.adj_mask[u] >> v & 1)
            assert u not in g.adj[u]


class TestVertexOrder:
    def test_already_sorted(self, path3):
        assert vertex_order(path3).perm == (0, 1, 2)

    def test_weight_then_degree(self):
        # weights [3,3,7], degrees [1,2,1]: edges 0-1, 1-2
        g = from_edges(3, [(0, 1), (1, 2)], [3, 3, 7])
        assert g.degrees == [1, 2, 1]
        assert vertex_order(g).perm == (2, 1, 0)

    def test_index_tie_break(self):
        g = from_edges(2, [(0, 1)], [4, 4])
        assert vertex_order(g).perm == (0, 1)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 25), st.sampled_from([0.1, 0.3, 0.6]), st.integers(0, 10**6))
    def test_sort_keys_hold(self, n, p, seed):
        g = random_graph(n, p, random.Random(seed), max_weight=5)
        order = vertex_order(g)
        assert sorted(order.perm) == list(range(n))
        assert all(order.perm[order.rank_of[v]] == v for v in range(n))
        deg = g.degrees
        for a, b in zip(order.perm, order.perm[1:]):
            assert (-g.weights[a], -deg[a], a) < (-g.weights[b], -deg[b], b)


class TestCliques:
    def test_complete_graph(self, triangle):
        assert frozenset({0, 1, 2}) in find_cliques(triangle)

    def test_edgeless(self, edgeless3):
        assert sorted(find_cliques(edgeless3), key=min) == [frozenset({0}), frozenset({1}), frozenset({2})]

    def test_path(self, path3):
        cliques = find_cliques(path3)
        assert frozenset({0, 1}) in cliques and frozenset({1, 2}) in cliques

    @pytest.mark.parametrize("seed", range(20))
    def test_pairwise_adjacent_and_covering(self, seed):
        g = random_graph(20, 0.4, random.Random(seed))
        cliques = find_cliques(g)
        covered = set()
        for c in cliques:
            covered |= c
            for u in c:
                assert c - {u} <= g.adj[u]
        assert covered == set(range(g.n))


class TestReduction:
    def star(self):
        # center 0 weight 10, leaves 1..3 weight 1
        return from_edges(4, [(0, 1), (0, 2), (0, 3)], [10, 1, 1, 1])

    def test_star_leaves_dominated(self):
        g = self.star()
        reduced, trace = reduce_graph(g)
        assert [v for v, _, _ in trace.steps] == [1, 2]
        assert all(rule == RULE_DOMINATED for _, rule, _ in trace.steps)
        assert trace.kept_map == [0, 3]
        assert exact_optimum(g).optimum == 11
        assert exact_optimum(reduced).optimum == 11

    def test_star_restore(self):
        g = self.star()
        reduced, trace = reduce_graph(g)
        opt = exact_optimum(reduced)
        colors = restore_solution(opt.colors, trace, g)
        assert check_coloring(g, colors) == (True, None)
        assert coloring_score(g, colors) == 11

    def test_equal_triangle_untouched(self):
        g = from_edges(3, [(0, 1), (1, 2), (0, 2)], [4, 4, 4])
        reduced, trace = reduce_graph(g)
        assert trace.steps == []
        assert reduced.n == 3

    def test_single_vertex(self):
        g = from_edges(1, [], [7])
        reduced, trace = reduce_graph(g)
        assert reduced.n == 1 and trace.steps == []
        assert restore_solution([0], trace, g) == [0]

    def test_clique_rule(self):
        # 0 (w5) hangs off 1 (w1); nothing heavy enough shares 1 with it, so
        # only the heavy edge 3-4 (two vertices >= 5, degree of 0 is 1) removes 0
        g = from_edges(5, [(0, 1), (1, 2), (3, 4)], [5, 1, 1, 6, 6])
        _, trace = reduce_graph(g)
        steps = {v: (rule, witness) for v, rule, witness in trace.steps}
        assert steps[2] == (RULE_DOMINATED, 0)
        assert steps[0] == (RULE_CLIQUE, (3, 4))
        assert exact_optimum(g).optimum == 12

    def test_no_vertex_deleted_twice(self):
        for g in seeded_graphs(50, 14, seed=5):
            _, trace = reduce_graph(g)
            deleted = [v for v, _, _ in trace.steps]
            assert len(deleted) == len(set(deleted))
            assert sorted(deleted + trace.kept_map) == list(range(g.n))

    def test_restore_rejects_mismatch(self):
        g = self.star()
        _, trace = reduce_graph(g)
        with pytest.raises(ValueError):
            restore_solution([0, 1, 2], trace, g)

    def test_optimum_preserved_small_sample(self):
        for g in seeded_graphs(60, 11, seed=17):
            reduced, trace = reduce_graph(g)
            opt_r = exact_optimum(reduced)
            assert opt_r.optimum == exact_optimum(g).optimum
            colors = restore_solution(opt_r.colors, trace, g)
            assert check_coloring(g, colors)[0]
            assert coloring_score(g, colors) == opt_r.optimum


class TestIO:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 30), st.sampled_from([0.0, 0.2, 0.7]), st.integers(0, 10**6))
    def test_round_trip(self, n, p, seed):
        g = random_graph(n, p, random.Random(seed))
        raw = parse_col(serialize_col(g))
        h = build_graph(raw, parse_weights(serialize_weights(g), raw.n), g.name)
        assert h == g

    def test_load_default_and_explicit_weights(self, tmp_path, triangle):
        save_instance(triangle, tmp_path / "k3.col")
        g = load_instance(tmp_path / "k3.col")
        assert g.name == "k3" and g.weights == (5, 3, 2)
        (tmp_path / "other.w").write_text("1\n1\n1\n")
        assert load_instance(tmp_path / "k3.col", tmp_path / "other.w").weights == (1, 1, 1)
