"""Iterated tabu search in the partial legal space.

Only vertices in the free set may change group. Group slots are never
renumbered here, so a vertex outside the free set keeps its exact color
index; emptied slots are reused when a new group is needed.
"""

from __future__ import annotations

import random
import time
from typing import Callable

from .coloring import PartialColoring
from .graph import _bits

BASE_TENURE = 10


class GrenadeError(ValueError):
    pass


def _empty_slot(s: PartialColoring) -> int:
    for i, m in enumerate(s.group_mask):
        if not m:
            return i
    return len(s.group_mask)


def tenure(s: PartialColoring, rng: random.Random) -> int:
    return BASE_TENURE + rng.randint(0, s.uncolored.bit_count())


def perturb(
    s: PartialColoring,
    free: int,
    rng: random.Random,
    n_groups: int | None = None,
    tabu: dict[tuple[int, int], int] | None = None,
    step: int = 0,
) -> list[int]:
    """Uncolor the heaviest free vertex of 1 to 3 random groups.

    With ``tabu`` given, sending a vertex straight back to the group it left
    becomes tabu. Returns the uncolored vertices.
    """
    g = rng.randint(1, 3) if n_groups is None else n_groups
    candidates = [i for i, m in enumerate(s.group_mask) if m & free]
    chosen = rng.sample(candidates, min(g, len(candidates)))
    w = s.g.weights
    removed = []
    for i in chosen:
        v = max(_bits(s.group_mask[i] & free), key=lambda x: (w[x], -x))
        s.uncolor(v)
        removed.append(v)
        if tabu is not None:
            tabu[(v, i)] = step + tenure(s, rng)
    return removed


def _relocate(s: PartialColoring, v: int, avoid: int) -> bool:
    """Put uncolored ``v`` into a compatible group it does not make heavier."""
    a = s.g.adj_mask[v]
    wv = s.g.weights[v]
    for j, m in enumerate(s.group_mask):
        if j != avoid and m and not a & m and s.group_max[j] >= wv:
            s.assign(v, j)
            return True
    return False


def grenade(s: PartialColoring, u: int, i: int, free: int) -> list[int]:
    """Move free vertex ``u`` into group ``i``, evicting its neighbours there.

    Evicted vertices go to another group where they fit at no cost, or to the
    uncolored set. Returns the vertices left uncolored by the eviction.
    ``i == len(groups)`` (or an empty slot) opens a new group.
    """
    if not free >> u & 1:
        raise GrenadeError(f"vertex {u} is not free")
    if s.color_of[u] == i:
        raise GrenadeError(f"vertex {u} is already in group {i}")
    target = s.group_mask[i] if i < len(s.group_mask) else 0
    clash = s.g.adj_mask[u] & target
    if clash & ~free:
        raise GrenadeError(f"vertex {u} conflicts with a non-free vertex of group {i}")
    s.uncolor(u)
    evicted = list(_bits(clash))
    for v in evicted:
        s.uncolor(v)
    s.assign(u, i)
    return [v for v in evicted if not _relocate(s, v, i)]


def _group_drop(s: PartialColoring) -> list[int]:
    """Per group, the max weight once its heaviest vertex leaves."""
    w = s.g.weights
    out = []
    for m in s.group_mask:
        top = second = 0
        for v in _bits(m):
            x = w[v]
            if x > top:
                top, second = x, top
            elif x > second:
                second = x
        out.append(second)
    return out


def _best_move(s, free, tabu, step, best_score, rng):
    """Lowest (score + uncolored weight) move in the grenade neighbourhood.

    Evicted vertices are priced as uncolored; relocation on application can
    only do better. Ties are broken uniformly at random.
    """
    g = s.g
    w = g.weights
    adj = g.adj_mask
    gmask = s.group_mask
    gmax = s.group_max
    drop = _group_drop(s)
    # a group is reachable for u only if every neighbour of u inside it is free
    block = [0] * len(gmask)
    for i, m in enumerate(gmask):
        b = 0
        for v in _bits(m & ~free):
            b |= adj[v]
        block[i] = b
    # members heaviest first, to find the max left after an eviction
    by_weight = [sorted(_bits(m), key=w.__getitem__, reverse=True) for m in gmask]
    new_slot = _empty_slot(s)
    live = [i for i, m in enumerate(gmask) if m]
    n_uncolored = s.uncolored.bit_count()

    best_delta = None
    best = None
    ties = 0
    # vertices whose removal cannot lower the objective come last: every move
    # of theirs costs >= 0, so they are skipped once a negative move is known
    first, rest = [], []
    for u in _bits(free):
        j = s.color_of[u]
        if j == -1 or w[u] == gmax[j]:
            first.append(u)
        else:
            rest.append(u)
    for u in first + rest:
        wu = w[u]
        j = s.color_of[u]
        if j == -1:
            rem, rem_score = -wu, 0
        else:
            rem_score = (drop[j] - gmax[j]) if wu == gmax[j] else 0
            rem = rem_score
            if rem == 0 and best_delta is not None and best_delta < 0:
                continue
        u_bit = 1 << u
        still_uncolored = n_uncolored - (1 if j == -1 else 0)
        for i in live:
            if i == j or block[i] & u_bit:
                continue
            clash = adj[u] & gmask[i]
            if not clash:
                add = wu - gmax[i] if wu > gmax[i] else 0
                disp = 0
            else:
                rmax = 0
                for v in by_weight[i]:
                    if not clash >> v & 1:
                        rmax = w[v]
                        break
                add = max(wu, rmax) - gmax[i]
                if best_delta is not None and rem + add >= best_delta:
                    continue
                disp = sum(w[v] for v in _bits(clash))
            delta = rem + add + disp
            if best_delta is not None and delta > best_delta:
                continue
            if tabu.get((u, i), -1) >= step:
                new_score = s.score + rem_score + add
                if clash or still_uncolored or new_score >= best_score:
                    continue
            if best_delta is None or delta < best_delta:
                best_delta, best, ties = delta, (u, i), 1
            else:
                ties += 1
                if rng.randrange(ties) == 0:
                    best = (u, i)
        # opening a group only makes sense when u is not already alone
        if j == -1 or gmask[j] != u_bit:
            delta = rem + wu
            if best_delta is None or delta < best_delta:
                best_delta, best, ties = delta, (u, new_slot), 1
            elif delta == best_delta:
                ties += 1
                if rng.randrange(ties) == 0:
                    best = (u, new_slot)
    return best


def repair_and_improve(
    s: PartialColoring,
    free: int,
    tabu: dict[tuple[int, int], int],
    rng: random.Random,
    step: int = 0,
    best_score: float = float("inf"),
    max_steps: int | None = None,
) -> int:
    """Apply best non-tabu grenade moves until nothing is uncolored.

    Runs at most ``max_steps`` moves (default ``10 * (|free| + 1)``); any
    vertex still uncolored after that goes into its first compatible group.
    Returns the updated step counter.
    """
    free &= (1 << s.g.n) - 1
    if max_steps is None:
        max_steps = 10 * (free.bit_count() + 1)
    taken = 0
    while s.uncolored and taken < max_steps:
        move = _best_move(s, free, tabu, step, best_score, rng)
        if move is None:
            break
        u, i = move
        j = s.color_of[u]
        target = s.group_mask[i] if i < len(s.group_mask) else 0
        evicted = list(_bits(s.g.adj_mask[u] & target))
        grenade(s, u, i, free)
        if j != -1:
            tabu[(u, j)] = step + tenure(s, rng)
        for v in evicted:
            tabu[(v, i)] = step + tenure(s, rng)
        step += 1
        taken += 1
    for v in list(_bits(s.uncolored)):
        a = s.g.adj_mask[v]
        slot = next((i for i, m in enumerate(s.group_mask) if m and not a & m), None)
        s.assign(v, slot if slot is not None else _empty_slot(s))
    return step


def its(
    s: PartialColoring,
    free: int,
    iterations: int,
    rng: random.Random,
    deadline: float | None = None,
    clock: Callable[[], float] = time.monotonic,
    on_improve: Callable[[PartialColoring], None] | None = None,
) -> PartialColoring:
    """Iterated tabu search from a complete solution.

    Each cycle restarts from the best solution so far, perturbs it and
    repairs it. Vertices outside ``free`` (a bitmask) never move. Returns a
    new solution no worse than ``s``. ``iterations=0`` with a deadline runs
    until the deadline.
    """
    best = s.copy()
    free &= (1 << s.g.n) - 1
    if not free or (iterations <= 0 and deadline is None):
        return best
    tabu: dict[tuple[int, int], int] = {}
    step = 0
    done = 0
    while iterations <= 0 or done < iterations:
        if deadline is not None and clock() >= deadline:
            break
        done += 1
        cur = best.copy()
        perturb(cur, free, rng, tabu=tabu, step=step)
        step = repair_and_improve(cur, free, tabu, rng, step, best.score)
        if cur.score < best.score:
            best = cur
            if on_improve is not None:
                on_improve(best)
    return best
