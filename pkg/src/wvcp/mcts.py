"""Monte Carlo Tree Search over the ordered, symmetry-cut coloring tree."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .coloring import Move, PartialColoring, apply_move, empty_solution, first_fit
from .graph import WeightedGraph, vertex_order
from .localsearch import its

SIMULATIONS = ("random", "greedy-random", "greedy", "its")


@dataclass
class MctsConfig:
    c: float = 1.0
    simulation: str = "greedy-random"
    its_iterations: int = 500
    time_limit: float = 0.0  # seconds, 0 = no limit
    seed: int = 0
    max_iterations: int = 0  # 0 = no limit
    target: int | None = None  # stop once best_score <= target

    def __post_init__(self) -> None:
        if self.simulation not in SIMULATIONS:
            raise ValueError(f"unknown simulation {self.simulation!r}, expected one of {SIMULATIONS}")
        if self.c < 0:
            raise ValueError("exploration coefficient must be >= 0")
        if self.time_limit < 0 or self.max_iterations < 0 or self.its_iterations < 0:
            raise ValueError("limits must be non-negative")


@dataclass
class RunResult:
    best_colors: list[int]
    best_score: int
    time_to_best: float
    proven_optimal: bool
    iterations: int
    score_trace: list[tuple[float, int]] = field(default_factory=list)
    total_time: float = 0.0
    first_score: int | None = None


class MctsNode:
    """One node of the search tree.

    ``score`` is the partial score of the state reached by ``move``.
    ``unopened`` lists the colors of legal child moves not opened yet, in
    ascending order, so the new-group move is always last.
    The running mean is kept as an integer total to stay exact.
    """

    __slots__ = ("move", "parent", "children", "unopened", "nb_visits", "total_score", "score", "depth", "k")

    def __init__(self, move: Move | None, parent: MctsNode | None, score: int, depth: int, k: int):
        self.move = move
        self.parent = parent
        self.children: list[MctsNode] = []
        self.unopened: list[int] = []
        self.nb_visits = 0
        self.total_score = 0
        self.score = score
        self.depth = depth
        self.k = k

    @property
    def avg_score(self) -> float:
        if self.nb_visits == 0:
            raise ValueError("node has not been visited")
        return self.total_score / self.nb_visits

    def update(self, f: int) -> None:
        self.total_score += f
        self.nb_visits += 1

    def __repr__(self) -> str:
        return f"MctsNode(move={self.move}, visits={self.nb_visits}, score={self.score})"


def normalized_scores(siblings: list[MctsNode]) -> list[float]:
    """Rank siblings from worst (1) to best (l) average; return rank / sum of ranks.

    Ties on the average are ordered by color index, lowest color ranked higher.
    """
    l = len(siblings)
    order = sorted(range(l), key=lambda i: (siblings[i].avg_score, siblings[i].move.color))
    total = l * (l + 1) / 2
    out = [0.0] * l
    for pos, i in enumerate(order):
        out[i] = (l - pos) / total
    return out


def uct_value(child: MctsNode, siblings: list[MctsNode], parent_visits: int, c: float) -> float:
    if child.nb_visits == 0:
        raise ValueError("uct_value on an unvisited child")
    norm = normalized_scores(siblings)[siblings.index(child)]
    return norm + c * math.sqrt(2 * math.log(parent_visits) / child.nb_visits)


def select_best_child(node: MctsNode, c: float) -> MctsNode:
    ch = node.children
    if len(ch) == 1:
        return ch[0]
    norm = normalized_scores(ch)
    log_n = math.log(node.nb_visits)
    best, best_val = ch[0], -math.inf
    for child, ns in zip(ch, norm):
        val = ns + c * math.sqrt(2 * log_n / child.nb_visits)
        if val > best_val:
            best, best_val = child, val
    return best


def simulate(s: PartialColoring, strategy: str, rng: random.Random) -> PartialColoring:
    """Color the remaining vertices in order, in place.

    random: uniform over all legal moves, new group included.
    greedy-random: uniform over existing compatible groups, new group only as a fallback.
    greedy: first compatible group.
    """
    perm = s.order.perm
    adj = s.g.adj_mask
    for pos in range(s.next_pos, s.g.n):
        u = perm[pos]
        if strategy == "greedy":
            c = first_fit(s, u)
        else:
            a = adj[u]
            cands = [i for i, m in enumerate(s.group_mask) if not a & m]
            if strategy == "random":
                cands.append(len(s.group_mask))
                c = rng.choice(cands)
            elif strategy == "greedy-random":
                c = rng.choice(cands) if cands else len(s.group_mask)
            else:
                raise ValueError(f"unknown simulation strategy {strategy!r}")
        s.assign(u, c)
        s.next_pos = pos + 1
    return s


def greedy_coloring(g: WeightedGraph) -> PartialColoring:
    """Baseline: ordered vertices, each into the first compatible group."""
    return simulate(empty_solution(g), "greedy", random.Random(0))


def backpropagate(path: list[MctsNode], f: int) -> None:
    for node in path:
        node.update(f)


class Mcts:
    """Search state for one run; ``step`` performs one iteration."""

    def __init__(self, g: WeightedGraph, config: MctsConfig | None = None, clock: Callable[[], float] = time.monotonic):
        self.g = g
        self.config = config or MctsConfig()
        self.clock = clock
        self.order = vertex_order(g)
        self.rng = random.Random(self.config.seed)
        root_state = empty_solution(g, self.order)
        self.root: MctsNode | None = MctsNode(None, None, root_state.score, 0, root_state.k)
        self.best_score: float = math.inf
        self.best_colors: list[int] | None = None
        self.iterations = 0
        self.first_score: int | None = None
        self.score_trace: list[tuple[float, int]] = []
        self.time_to_best = 0.0
        self.start = clock()
        self._open_moves(self.root, root_state)

    @property
    def exhausted(self) -> bool:
        return self.root is None

    def _open_moves(self, node: MctsNode, s: PartialColoring) -> None:
        """Fill ``node.unopened`` with the legal colors for the next vertex."""
        u = s.next_vertex()
        if u is None:
            node.unopened = []
            return
        a = self.g.adj_mask[u]
        colors = [i for i, m in enumerate(s.group_mask) if not a & m]
        if s.score + self.g.weights[u] < self.best_score:
            colors.append(len(s.group_mask))
        node.unopened = colors

    def _delete(self, node: MctsNode) -> None:
        """Remove ``node`` and every ancestor left with nothing to explore."""
        while True:
            parent = node.parent
            if parent is None:
                # a subtree already cut off by ``clean`` must not exhaust the tree
                if node is self.root:
                    self.root = None
                return
            parent.children.remove(node)
            node.parent = None
            if parent.children or parent.unopened:
                return
            node = parent

    def select(self, s: PartialColoring) -> tuple[MctsNode | None, list[MctsNode]]:
        """Descend by UCT until a node with unopened moves or no children.

        Returns ``(None, path)`` when a node on the way was pruned.
        """
        node = self.root
        path = [node]
        while not node.unopened and node.children:
            node = select_best_child(node, self.config.c)
            apply_move(s, node.move)
            path.append(node)
            if node.score >= self.best_score:
                self._delete(node)
                return None, path
        return node, path

    def expand(self, leaf: MctsNode, s: PartialColoring) -> MctsNode | None:
        """Open the lowest-colored unopened move of ``leaf``.

        Returns None when the new child is pruned on the spot.
        """
        if not leaf.unopened:
            raise ValueError("leaf has no unopened move")
        color = leaf.unopened.pop(0)
        apply_move(s, Move(s.next_vertex(), color))
        if s.score >= self.best_score:
            if not leaf.unopened and not leaf.children:
                self._delete(leaf)
            return None
        child = MctsNode(Move(s.order.perm[s.next_pos - 1], color), leaf, s.score, leaf.depth + 1, s.k)
        leaf.children.append(child)
        self._open_moves(child, s)
        return child

    def _complete(self, s: PartialColoring) -> PartialColoring:
        cfg = self.config
        if cfg.simulation != "its":
            return simulate(s, cfg.simulation, self.rng)
        free = s.uncolored
        simulate(s, "greedy", self.rng)
        if cfg.its_iterations == 0:
            return s
        deadline = self.start + cfg.time_limit if cfg.time_limit else None
        return its(s, free, cfg.its_iterations, self.rng, deadline=deadline, clock=self.clock)

    def clean(self) -> None:
        """Drop every node and unopened move whose partial score reaches the best."""
        if self.root is None:
            return
        preorder = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            preorder.append(node)
            stack.extend(node.children)
        perm, w = self.order.perm, self.g.weights
        dead: set[int] = set()
        for node in reversed(preorder):
            if node.score >= self.best_score:
                dead.add(id(node))
                continue
            if node.unopened and node.unopened[-1] == node.k:
                if node.score + w[perm[node.depth + 1]] >= self.best_score:
                    node.unopened.pop()
            if node.children:
                kept = [c for c in node.children if id(c) not in dead]
                for c in node.children:
                    if id(c) in dead:
                        c.parent = None
                node.children = kept
            if not node.children and not node.unopened:
                dead.add(id(node))
        if id(self.root) in dead:
            self.root = None

    def step(self) -> bool:
        """One iteration. Returns False once the tree is exhausted."""
        if self.root is None:
            return False
        s = empty_solution(self.g, self.order)
        leaf, path = self.select(s)
        if leaf is None:
            return self.root is not None
        node = leaf
        if leaf.unopened:
            node = self.expand(leaf, s)
            if node is None:
                return self.root is not None
            path.append(node)
        s = self._complete(s)
        f = s.score
        self.iterations += 1
        if self.first_score is None:
            self.first_score = f
        backpropagate(path, f)
        if f < self.best_score:
            self.best_score = f
            self.best_colors = s.colors()
            self.time_to_best = self.clock() - self.start
            self.score_trace.append((self.time_to_best, f))
            self.clean()
        if node.parent is not None or node is self.root:
            if not node.unopened and not node.children:
                self._delete(node)
        return self.root is not None

    def result(self) -> RunResult:
        return RunResult(
            best_colors=self.best_colors or [],
            best_score=int(self.best_score) if self.best_colors is not None else 0,
            time_to_best=self.time_to_best,
            proven_optimal=self.root is None,
            iterations=self.iterations,
            score_trace=list(self.score_trace),
            total_time=self.clock() - self.start,
            first_score=self.first_score,
        )


def run(g: WeightedGraph, config: MctsConfig | None = None, clock: Callable[[], float] = time.monotonic) -> RunResult:
    """Iterate until the tree is exhausted, a limit is hit or the target score is reached."""
    search = Mcts(g, config, clock)
    cfg = search.config
    while search.root is not None:
        if cfg.time_limit and clock() - search.start >= cfg.time_limit:
            break
        if cfg.max_iterations and search.iterations >= cfg.max_iterations:
            break
        if cfg.target is not None and search.best_score <= cfg.target:
            break
        search.step()
    return search.result()
