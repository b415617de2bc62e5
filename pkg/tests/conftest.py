import itertools
import random
from functools import lru_cache
from pathlib import Path

import pytest

from wvcp.generators import random_graph
from wvcp.graph import from_edges

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "instances"

# filled by test_acceptance, printed at the end of the session
CRITERIA_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)


def brute_force_assignments(g):
    """Try every map vertex -> color in 0..n-1. Only for n <= 7."""
    best = None
    for colors in itertools.product(range(g.n), repeat=g.n):
        if any(colors[u] == colors[v] for u, v in g.edges()):
            continue
        groups = {}
        for v, c in enumerate(colors):
            groups[c] = max(groups.get(c, 0), g.weights[v])
        s = sum(groups.values())
        if best is None or s < best:
            best = s
    return best if best is not None else 0


def subset_dp_optimum(g):
    """Minimum over set partitions into independent sets, by DP on vertex subsets."""
    n = g.n
    full = (1 << n) - 1
    independent = [True] * (1 << n)
    maxw = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        rest = m & (m - 1)
        independent[m] = independent[rest] and not (g.adj_mask[low] & rest)
        maxw[m] = max(maxw[rest], g.weights[low])

    @lru_cache(maxsize=None)
    def best(m):
        if m == 0:
            return 0
        low = m & -m
        rest = m ^ low
        out = None
        sub = rest
        while True:
            part = sub | low
            if independent[part]:
                val = maxw[part] + best(m & ~part)
                if out is None or val < out:
                    out = val
            if sub == 0:
                break
            sub = (sub - 1) & rest
        return out

    return best(full)


def seeded_graphs(count, n_max, seed, n_min=1, probs=(0.2, 0.5), max_weight=20):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(n_min, n_max)
        p = rng.choice(probs)
        yield random_graph(n, p, rng, max_weight=max_weight)


@pytest.fixture
def triangle():
    return from_edges(3, [(0, 1), (1, 2), (0, 2)], [5, 3, 2], "k3")


@pytest.fixture
def path3():
    return from_edges(3, [(0, 1), (1, 2)], [5, 3, 2], "path")


@pytest.fixture
def edgeless3():
    return from_edges(3, [], [5, 3, 2], "edgeless")
