"""Exhaustive exact solver for tiny instances, used as ground truth in tests."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import WeightedGraph, vertex_order

DEFAULT_CAP = 16


class OracleCapExceeded(ValueError):
    pass


@dataclass
class OracleResult:
    optimum: int
    colors: list[int]
    nodes_explored: int


def exact_optimum(g: WeightedGraph, cap: int = DEFAULT_CAP) -> OracleResult:
    """Depth-first search over the ordered construction tree.

    Each vertex, taken heaviest first, goes into an existing compatible group
    or into one new group. Branches whose partial score already reaches the
    incumbent are cut; since vertices arrive in non-increasing weight order a
    partial score never decreases further down.
    """
    if g.n > cap:
        raise OracleCapExceeded(f"{g.n} vertices exceeds the oracle cap of {cap}")
    if g.n == 0:
        return OracleResult(0, [], 0)
    perm = vertex_order(g).perm
    w = g.weights
    adj = g.adj_mask

    masks: list[int] = []
    colors = [-1] * g.n
    best_score = sum(w) + 1
    best_colors: list[int] = []
    nodes = 0

    def dfs(pos: int, partial: int) -> None:
        nonlocal best_score, best_colors, nodes
        nodes += 1
        if partial >= best_score:
            return
        if pos == g.n:
            best_score = partial
            best_colors = colors[:]
            return
        u = perm[pos]
        bit = 1 << u
        for i in range(len(masks)):
            if not adj[u] & masks[i]:
                masks[i] |= bit
                colors[u] = i
                dfs(pos + 1, partial)
                masks[i] &= ~bit
        masks.append(bit)
        colors[u] = len(masks) - 1
        dfs(pos + 1, partial + w[u])
        masks.pop()
        colors[u] = -1

    dfs(0, 0)
    return OracleResult(best_score, best_colors, nodes)
