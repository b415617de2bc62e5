"""Partial legal colorings and the move set shared by every search method.

Groups are indexed from 0. A move ``(u, k)`` where ``k`` is the current
number of groups opens a new group.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import NamedTuple

from .graph import VertexOrder, WeightedGraph, _bits, vertex_order


class IllegalMove(ValueError):
    pass


class Move(NamedTuple):
    vertex: int
    color: int


class PartialColoring:
    """A legal, possibly partial, coloring with an incrementally kept score.

    In construction mode vertices are colored strictly along ``order`` and
    ``next_pos`` points at the next one. Local search uses ``assign`` and
    ``uncolor`` freely and may leave empty group slots behind.
    """

    __slots__ = ("g", "order", "group_mask", "group_max", "color_of", "score", "next_pos", "uncolored", "free")

    def __init__(self, g: WeightedGraph, order: VertexOrder | None = None):
        self.g = g
        self.order = order if order is not None else vertex_order(g)
        self.group_mask: list[int] = []
        self.group_max: list[int] = []
        self.color_of: list[int] = [-1] * g.n
        self.score = 0
        self.next_pos = 0
        self.uncolored = (1 << g.n) - 1
        self.free = 0

    def copy(self) -> PartialColoring:
        s = PartialColoring.__new__(PartialColoring)
        s.g = self.g
        s.order = self.order
        s.group_mask = self.group_mask[:]
        s.group_max = self.group_max[:]
        s.color_of = self.color_of[:]
        s.score = self.score
        s.next_pos = self.next_pos
        s.uncolored = self.uncolored
        s.free = self.free
        return s

    @property
    def k(self) -> int:
        return len(self.group_mask)

    @property
    def groups(self) -> list[list[int]]:
        return [list(_bits(m)) for m in self.group_mask]

    @property
    def is_complete(self) -> bool:
        return self.uncolored == 0

    def next_vertex(self) -> int | None:
        if self.next_pos >= self.g.n:
            return None
        return self.order.perm[self.next_pos]

    # general assignment primitives

    def assign(self, v: int, i: int) -> None:
        """Put uncolored ``v`` into group ``i`` (``i == k`` appends a group)."""
        if self.color_of[v] != -1:
            raise IllegalMove(f"vertex {v} is already colored")
        if i == len(self.group_mask):
            self.group_mask.append(0)
            self.group_max.append(0)
        elif not 0 <= i < len(self.group_mask):
            raise IllegalMove(f"group {i} does not exist")
        if self.g.adj_mask[v] & self.group_mask[i]:
            raise IllegalMove(f"vertex {v} conflicts with group {i}")
        w = self.g.weights[v]
        if w > self.group_max[i]:
            self.score += w - self.group_max[i]
            self.group_max[i] = w
        self.group_mask[i] |= 1 << v
        self.color_of[v] = i
        self.uncolored &= ~(1 << v)

    def uncolor(self, v: int) -> None:
        i = self.color_of[v]
        if i == -1:
            return
        self.group_mask[i] &= ~(1 << v)
        self.color_of[v] = -1
        self.uncolored |= 1 << v
        if self.g.weights[v] == self.group_max[i]:
            new_max = max((self.g.weights[u] for u in _bits(self.group_mask[i])), default=0)
            self.score -= self.group_max[i] - new_max
            self.group_max[i] = new_max

    def colors(self) -> list[int]:
        return self.color_of[:]

    def compact(self) -> None:
        """Drop empty group slots and renumber the rest in order."""
        keep = [i for i, m in enumerate(self.group_mask) if m]
        remap = {old: new for new, old in enumerate(keep)}
        self.group_mask = [self.group_mask[i] for i in keep]
        self.group_max = [self.group_max[i] for i in keep]
        self.color_of = [remap[c] if c >= 0 else -1 for c in self.color_of]


def empty_solution(g: WeightedGraph, order: VertexOrder | None = None) -> PartialColoring:
    """Root state: first ordered vertex alone in the first group."""
    if g.n == 0:
        raise ValueError("empty graph")
    s = PartialColoring(g, order)
    s.assign(s.order.perm[0], 0)
    s.next_pos = 1
    return s


def _check_next(s: PartialColoring, u: int) -> None:
    if s.color_of[u] != -1:
        raise IllegalMove(f"vertex {u} is already colored")


def legal_moves(s: PartialColoring, u: int) -> list[Move]:
    _check_next(s, u)
    a = s.g.adj_mask[u]
    moves = [Move(u, i) for i, m in enumerate(s.group_mask) if not a & m]
    moves.append(Move(u, len(s.group_mask)))
    return moves


def greedy_moves(s: PartialColoring, u: int) -> list[Move]:
    """Existing-group moves only; the new-group move when none exists."""
    _check_next(s, u)
    a = s.g.adj_mask[u]
    moves = [Move(u, i) for i, m in enumerate(s.group_mask) if not a & m]
    return moves or [Move(u, len(s.group_mask))]


def legal_colors(s: PartialColoring, u: int) -> list[int]:
    a = s.g.adj_mask[u]
    out = [i for i, m in enumerate(s.group_mask) if not a & m]
    out.append(len(s.group_mask))
    return out


def first_fit(s: PartialColoring, u: int) -> int:
    a = s.g.adj_mask[u]
    for i, m in enumerate(s.group_mask):
        if not a & m:
            return i
    return len(s.group_mask)


def apply_move(s: PartialColoring, m: Move) -> PartialColoring:
    """Apply a construction move in place and return ``s``."""
    u = s.next_vertex()
    if m.vertex != u:
        raise IllegalMove(f"expected vertex {u}, got {m.vertex}")
    if not 0 <= m.color <= len(s.group_mask):
        raise IllegalMove(f"color {m.color} out of range 0..{len(s.group_mask)}")
    s.assign(m.vertex, m.color)
    s.next_pos += 1
    return s


def score(s: PartialColoring) -> int:
    """Score recomputed from scratch."""
    w = s.g.weights
    return sum(max((w[v] for v in _bits(m)), default=0) for m in s.group_mask)


def coloring_score(g: WeightedGraph, colors: list[int]) -> int:
    best: dict[int, int] = {}
    for v, c in enumerate(colors):
        if c >= 0:
            best[c] = max(best.get(c, 0), g.weights[v])
    return sum(best.values())


def is_legal(s: PartialColoring) -> tuple[bool, str | None]:
    """Check every structural invariant; returns the first violation found."""
    g = s.g
    seen = 0
    for i, m in enumerate(s.group_mask):
        if m & seen:
            v = (m & seen).bit_length() - 1
            return False, f"vertex {v} in two groups"
        seen |= m
        for v in _bits(m):
            if s.color_of[v] != i:
                return False, f"vertex {v} in group {i} but color_of says {s.color_of[v]}"
            clash = g.adj_mask[v] & m
            if clash:
                return False, f"edge ({v}, {clash.bit_length() - 1}) inside group {i}"
        gm = max((g.weights[v] for v in _bits(m)), default=0)
        if gm != s.group_max[i]:
            return False, f"group {i} max is {gm}, recorded {s.group_max[i]}"
    if seen & s.uncolored:
        return False, f"vertex {(seen & s.uncolored).bit_length() - 1} both colored and uncolored"
    if seen | s.uncolored != (1 << g.n) - 1:
        missing = ((1 << g.n) - 1) & ~(seen | s.uncolored)
        return False, f"vertex {missing.bit_length() - 1} neither colored nor uncolored"
    for v in _bits(s.uncolored):
        if s.color_of[v] != -1:
            return False, f"uncolored vertex {v} has color {s.color_of[v]}"
    if score(s) != s.score:
        return False, f"score {s.score} differs from recomputed {score(s)}"
    return True, None


def check_coloring(g: WeightedGraph, colors: list[int]) -> tuple[bool, str | None]:
    """Legality of a complete color vector."""
    if len(colors) != g.n:
        return False, f"expected {g.n} colors, got {len(colors)}"
    for v, c in enumerate(colors):
        if c < 0:
            return False, f"vertex {v} is uncolored"
    for u, v in g.edges():
        if colors[u] == colors[v]:
            return False, f"edge ({u}, {v}) has both ends colored {colors[u]}"
    return True, None


def from_colors(g: WeightedGraph, colors: list[int], order: VertexOrder | None = None) -> PartialColoring:
    """Build a PartialColoring from a color vector (-1 means uncolored)."""
    s = PartialColoring(g, order)
    k = max(colors, default=-1) + 1
    s.group_mask = [0] * k
    s.group_max = [0] * k
    for v, c in enumerate(colors):
        if c >= 0:
            s.assign(v, c)
    s.next_pos = g.n - s.uncolored.bit_count()
    return s


def format_solution(g: WeightedGraph, colors: list[int], original_index: list[int] | None = None) -> str:
    lines = [f"score {coloring_score(g, colors)}"]
    for v, c in enumerate(colors):
        idx = original_index[v] if original_index is not None else v
        lines.append(f"{idx + 1} {c + 1}")
    return "\n".join(lines) + "\n"


def write_solution(g: WeightedGraph, colors: list[int], path: str | os.PathLike) -> None:
    Path(path).write_text(format_solution(g, colors))


def parse_solution(text: str, n: int) -> tuple[int | None, list[int]]:
    """Parse a solution file into (declared score, 0-indexed colors)."""
    declared = None
    colors = [-1] * n
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "score":
            if len(parts) != 2:
                raise ValueError(f"malformed score header, line {lineno}")
            try:
                declared = int(parts[1])
            except ValueError:
                raise ValueError(f"non-integer score, line {lineno}") from None
            continue
        if len(parts) != 2:
            raise ValueError(f"expected '<vertex> <color>', line {lineno}")
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"non-integer token, line {lineno}") from None
        if not 1 <= v <= n:
            raise ValueError(f"vertex out of range, line {lineno}")
        if c < 1:
            raise ValueError(f"color must be positive, line {lineno}")
        if colors[v - 1] != -1:
            raise ValueError(f"vertex {v} listed twice, line {lineno}")
        colors[v - 1] = c - 1
    return declared, colors
