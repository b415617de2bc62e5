"""Weighted vertex coloring by Monte Carlo Tree Search with greedy and tabu-search rollouts."""

from .coloring import Move, PartialColoring, empty_solution, is_legal, legal_moves
from .graph import WeightedGraph, load_instance, reduce_graph, restore_solution, vertex_order
from .mcts import MctsConfig, RunResult, greedy_coloring, run
from .oracle import exact_optimum

__all__ = [
    "Move",
    "PartialColoring",
    "empty_solution",
    "is_legal",
    "legal_moves",
    "WeightedGraph",
    "load_instance",
    "reduce_graph",
    "restore_solution",
    "vertex_order",
    "MctsConfig",
    "RunResult",
    "greedy_coloring",
    "run",
    "exact_optimum",
]
