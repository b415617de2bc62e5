"""Instance ingestion, vertex ordering and graph reductions.

Adjacency is kept both as frozensets and as integer bitmasks; the search
code works almost exclusively on the masks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path


class InstanceError(ValueError):
    """Malformed instance or weight file."""


@dataclass(frozen=True)
class RawGraph:
    n: int
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    adj: tuple[frozenset[int], ...]
    weights: tuple[int, ...]
    name: str = ""
    adj_mask: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        masks = []
        for v, nbrs in enumerate(self.adj):
            m = 0
            for u in nbrs:
                m |= 1 << u
            masks.append(m)
        object.__setattr__(self, "adj_mask", tuple(masks))

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def subgraph(self, keep: list[int], name: str | None = None) -> WeightedGraph:
        """Induced subgraph on ``keep``, relabelled densely in the given order."""
        index = {v: i for i, v in enumerate(keep)}
        adj = tuple(frozenset(index[u] for u in self.adj[v] if u in index) for v in keep)
        return WeightedGraph(
            len(keep), adj, tuple(self.weights[v] for v in keep), name if name is not None else self.name
        )


def _int_token(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"non-integer token {tok!r}, line {lineno}") from None


def parse_col(text: str) -> RawGraph:
    """Read a DIMACS edge file (``p edge n m`` / ``e u v``, 1-indexed)."""
    n = None
    edges: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if n is not None:
                raise InstanceError(f"duplicate p line, line {lineno}")
            if len(parts) < 4:
                raise InstanceError(f"malformed p line, line {lineno}")
            n = _int_token(parts[2], lineno)
            _int_token(parts[3], lineno)
            if n < 0:
                raise InstanceError(f"negative vertex count, line {lineno}")
        elif parts[0] == "e":
            if n is None:
                raise InstanceError(f"edge before p line, line {lineno}")
            if len(parts) < 3:
                raise InstanceError(f"malformed edge, line {lineno}")
            u, v = _int_token(parts[1], lineno), _int_token(parts[2], lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise InstanceError(f"endpoint out of range, line {lineno}")
            if u == v:
                raise InstanceError(f"self-loop, line {lineno}")
            u, v = u - 1, v - 1
            edges.add((min(u, v), max(u, v)))
        else:
            raise InstanceError(f"unknown line type {parts[0]!r}, line {lineno}")
    if n is None:
        raise InstanceError("missing p line")
    return RawGraph(n, tuple(sorted(edges)))


def parse_weights(text: str, n: int) -> list[int]:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if len(lines) != n:
        raise InstanceError(f"expected {n} weights, got {len(lines)}")
    weights = []
    for lineno, tok in enumerate(lines, start=1):
        try:
            w = int(tok)
        except ValueError:
            raise InstanceError(f"non-integer weight at line {lineno}") from None
        if w <= 0:
            raise InstanceError(f"non-positive weight at line {lineno}")
        weights.append(w)
    return weights


def build_graph(raw: RawGraph, weights: list[int], name: str = "") -> WeightedGraph:
    if len(weights) != raw.n:
        raise InstanceError(f"expected {raw.n} weights, got {len(weights)}")
    if any(w < 1 for w in weights):
        raise InstanceError("weights must be positive")
    adj: list[set[int]] = [set() for _ in range(raw.n)]
    for u, v in raw.edges:
        if u == v:
            raise InstanceError(f"self-loop on vertex {u + 1}")
        if not (0 <= u < raw.n and 0 <= v < raw.n):
            raise InstanceError(f"endpoint out of range in edge ({u + 1}, {v + 1})")
        adj[u].add(v)
        adj[v].add(u)
    return WeightedGraph(raw.n, tuple(frozenset(a) for a in adj), tuple(weights), name)


def from_edges(n: int, edges, weights, name: str = "") -> WeightedGraph:
    """Convenience constructor from 0-indexed edges."""
    norm = {(min(u, v), max(u, v)) for u, v in edges}
    return build_graph(RawGraph(n, tuple(sorted(norm))), list(weights), name)


def load_instance(path: str | os.PathLike, weights_path: str | os.PathLike | None = None) -> WeightedGraph:
    """Load ``<name>.col`` plus its weight file (default ``<name>.col.w``)."""
    path = Path(path)
    wpath = Path(weights_path) if weights_path is not None else path.with_name(path.name + ".w")
    raw = parse_col(path.read_text())
    weights = parse_weights(wpath.read_text(), raw.n)
    name = path.name[:-4] if path.name.endswith(".col") else path.name
    return build_graph(raw, weights, name)


def serialize_col(g: WeightedGraph) -> str:
    edges = g.edges()
    lines = [f"p edge {g.n} {len(edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in edges]
    return "\n".join(lines) + "\n"


def serialize_weights(g: WeightedGraph) -> str:
    return "".join(f"{w}\n" for w in g.weights)


def save_instance(g: WeightedGraph, path: str | os.PathLike) -> None:
    path = Path(path)
    path.write_text(serialize_col(g))
    path.with_name(path.name + ".w").write_text(serialize_weights(g))


@dataclass(frozen=True)
class VertexOrder:
    perm: tuple[int, ...]
    rank_of: tuple[int, ...]


def vertex_order(g: WeightedGraph) -> VertexOrder:
    """Heaviest first, then highest degree, then lowest index."""
    deg = g.degrees
    perm = sorted(range(g.n), key=lambda v: (-g.weights[v], -deg[v], v))
    rank = [0] * g.n
    for i, v in enumerate(perm):
        rank[v] = i
    return VertexOrder(tuple(perm), tuple(rank))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _greedy_cliques(adj_mask, weights, alive: list[int]) -> list[frozenset[int]]:
    # one clique per vertex, grown from its neighbourhood heaviest first
    seen: set[frozenset[int]] = set()
    cliques = []
    for v in alive:
        members = [v]
        common = adj_mask[v]
        for u in sorted(_bits(adj_mask[v]), key=lambda x: (-weights[x], x)):
            if common >> u & 1:
                members.append(u)
                common &= adj_mask[u]
        c = frozenset(members)
        if c not in seen:
            seen.add(c)
            cliques.append(c)
    return cliques


def find_cliques(g: WeightedGraph) -> list[frozenset[int]]:
    return _greedy_cliques(g.adj_mask, g.weights, list(range(g.n)))


RULE_CLIQUE = 1
RULE_DOMINATED = 2


@dataclass
class ReductionTrace:
    """Deleted vertices in deletion order, in original indices.

    Each step is ``(vertex, rule, witness)`` where the witness is the
    dominating vertex for the neighbourhood rule and the clique (as a sorted
    tuple) for the clique rule.
    """

    steps: list[tuple[int, int, object]] = field(default_factory=list)
    kept_map: list[int] = field(default_factory=list)


def reduce_graph(g: WeightedGraph) -> tuple[WeightedGraph, ReductionTrace]:
    """Apply both deletion rules until neither fires.

    Clique rule: v of degree d goes if some clique C not containing v has at
    least d+1 members all at least as heavy as v.
    Domination rule: v1 goes if a non-adjacent v2 with w(v2) >= w(v1) is
    adjacent to every neighbour of v1.
    Both keep the optimum unchanged; see ``restore_solution``.
    """
    w = g.weights
    adj = list(g.adj_mask)
    alive = (1 << g.n) - 1
    steps: list[tuple[int, int, object]] = []

    def delete(v: int, rule: int, witness) -> None:
        nonlocal alive
        alive &= ~(1 << v)
        for u in _bits(adj[v]):
            adj[u] &= ~(1 << v)
        adj[v] = 0
        steps.append((v, rule, witness))

    changed = True
    while changed:
        changed = False
        for v1 in range(g.n):
            if not alive >> v1 & 1:
                continue
            cand = alive & ~(1 << v1) & ~adj[v1]
            for x in _bits(adj[v1]):
                cand &= adj[x]
                if not cand:
                    break
            for v2 in _bits(cand):
                if w[v2] >= w[v1]:
                    delete(v1, RULE_DOMINATED, v2)
                    changed = True
                    break

        vs = list(_bits(alive))
        cliques = _greedy_cliques(adj, w, vs)
        # for each d, cliques ordered by their (d+1)-th heaviest weight
        sorted_w = [sorted((w[u] for u in c), reverse=True) for c in cliques]
        max_size = max((len(c) for c in cliques), default=0)
        by_depth: list[list[int]] = []
        for d in range(max_size):
            idx = [i for i, sw in enumerate(sorted_w) if len(sw) > d]
            idx.sort(key=lambda i: -sorted_w[i][d])
            by_depth.append(idx)
        for v in vs:
            if not alive >> v & 1:
                continue
            d = adj[v].bit_count()
            if d >= max_size:
                continue
            for i in by_depth[d]:
                c = cliques[i]
                if sorted_w[i][d] < w[v]:
                    break
                # cliques may be stale after deletions within this pass
                if v in c or any(not alive >> u & 1 for u in c):
                    continue
                delete(v, RULE_CLIQUE, tuple(sorted(c)))
                changed = True
                break

    kept = list(_bits(alive))
    reduced = g.subgraph(kept)
    return reduced, ReductionTrace(steps, kept)


def restore_solution(reduced_colors: list[int], trace: ReductionTrace, g: WeightedGraph) -> list[int]:
    """Lift a coloring of the reduced graph back onto ``g``.

    ``reduced_colors[i]`` is the color of reduced vertex i. Deleted vertices
    are reinserted in reverse deletion order, each into a group it does not
    make heavier, so the score is unchanged.
    """
    if len(reduced_colors) != len(trace.kept_map):
        raise ValueError("reduced solution does not match the reduction trace")
    colors = [-1] * g.n
    for i, v in enumerate(trace.kept_map):
        colors[v] = reduced_colors[i]
    group_max: dict[int, int] = {}
    for v in range(g.n):
        if colors[v] >= 0:
            group_max[colors[v]] = max(group_max.get(colors[v], 0), g.weights[v])

    for v, rule, witness in reversed(trace.steps):
        blocked = {colors[u] for u in g.adj[v] if colors[u] >= 0}
        chosen = None
        if rule == RULE_DOMINATED and colors[witness] not in blocked:
            chosen = colors[witness]
        else:
            for c in sorted(group_max):
                if c not in blocked and group_max[c] >= g.weights[v]:
                    chosen = c
                    break
        if chosen is None:
            raise RuntimeError(f"cannot restore vertex {v}: no group accepts it without raising the score")
        colors[v] = chosen
    return colors
