import pytest

from conftest import brute_force_assignments, seeded_graphs, subset_dp_optimum
from wvcp.coloring import check_coloring, coloring_score
from wvcp.graph import from_edges
from wvcp.oracle import OracleCapExceeded, exact_optimum


def test_triangle(triangle):
    assert exact_optimum(triangle).optimum == 10


def test_edgeless(edgeless3):
    assert exact_optimum(edgeless3).optimum == 5


def test_five_cycle_unit_weights():
    g = from_edges(5, [(i, (i + 1) % 5) for i in range(5)], [1] * 5)
    assert exact_optimum(g).optimum == 3


def test_cap():
    g = from_edges(17, [], [1] * 17)
    with pytest.raises(OracleCapExceeded):
        exact_optimum(g)
    assert exact_optimum(g, cap=17).optimum == 1


def test_brute_force_helpers_agree_on_tiny_graphs():
    for g in seeded_graphs(60, 6, seed=11):
        assert brute_force_assignments(g) == subset_dp_optimum(g)


def test_agrees_with_independent_enumeration():
    """Double oracle: full assignment enumeration (n <= 6) or subset DP (n <= 10)."""
    for g in seeded_graphs(300, 10, seed=99):
        res = exact_optimum(g)
        expected = brute_force_assignments(g) if g.n <= 6 else subset_dp_optimum(g)
        assert res.optimum == expected
        assert check_coloring(g, res.colors) == (True, None)
        assert coloring_score(g, res.colors) == res.optimum
