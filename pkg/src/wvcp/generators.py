"""Seeded instance generators for tests and the bundled instance set."""

from __future__ import annotations

import itertools
import random

from .graph import WeightedGraph, from_edges


def random_graph(n: int, p: float, rng: random.Random, max_weight: int = 20, name: str = "") -> WeightedGraph:
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    weights = [rng.randint(1, max_weight) for _ in range(n)]
    return from_edges(n, edges, weights, name or f"random_{n}_{p}")


def queen_graph(rows: int, cols: int, rng: random.Random, max_weight: int = 20, name: str = "") -> WeightedGraph:
    """Queens graph: squares attack along rows, columns and diagonals."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    edges = []
    for a, b in itertools.combinations(range(len(cells)), 2):
        (r1, c1), (r2, c2) = cells[a], cells[b]
        if r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2):
            edges.append((a, b))
    weights = [rng.randint(1, max_weight) for _ in cells]
    return from_edges(len(cells), edges, weights, name or f"queen{rows}_{cols}")


def geometric_graph(n: int, radius: float, rng: random.Random, max_weight: int = 20, name: str = "") -> WeightedGraph:
    """Random points in the unit square, joined when closer than ``radius``."""
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    r2 = radius * radius
    edges = [
        (u, v)
        for u, v in itertools.combinations(range(n), 2)
        if (pts[u][0] - pts[v][0]) ** 2 + (pts[u][1] - pts[v][1]) ** 2 < r2
    ]
    weights = [rng.randint(1, max_weight) for _ in range(n)]
    return from_edges(n, edges, weights, name or f"geom{n}")
