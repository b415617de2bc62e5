"""Single solves, multi-seed experiments, coefficient sweeps and solution checks."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .coloring import check_coloring, coloring_score, parse_solution
from .graph import WeightedGraph, load_instance, reduce_graph, restore_solution
from .localsearch import its
from .mcts import MctsConfig, RunResult, greedy_coloring, run

log = logging.getLogger(__name__)

METHODS = ("greedy", "mcts-random", "mcts-greedy-random", "mcts-greedy", "mcts-its", "its")

RUN_FIELDS = [
    "instance",
    "method",
    "seed",
    "best_score",
    "time_to_best_s",
    "total_time_s",
    "proven_optimal",
    "iterations",
    "status",
]
AGGREGATE_FIELDS = ["instance", "method", "best", "avg", "t_best_avg", "proven_optimal_any", "runs"]
SWEEP_FIELDS = ["c", "runs", "min", "q1", "median", "q3", "max", "mean"]


class TickClock:
    """Deterministic stand-in for a wall clock: each reading advances by ``tick``."""

    def __init__(self, tick: float = 0.001):
        self.tick = tick
        self.now = 0.0

    def __call__(self) -> float:
        self.now += self.tick
        return self.now


def _compact(colors: list[int]) -> list[int]:
    """Renumber colors 0..k-1 keeping their relative order."""
    used = sorted(set(colors))
    remap = {c: i for i, c in enumerate(used)}
    return [remap[c] for c in colors]


@dataclass
class SolveOutcome:
    colors: list[int]
    result: RunResult
    reduced_n: int


def solve(
    g: WeightedGraph,
    method: str,
    seed: int = 0,
    time_limit: float = 0.0,
    c: float = 1.0,
    its_iterations: int = 500,
    reduction: bool = True,
    max_iterations: int = 0,
    clock: Callable[[], float] = time.monotonic,
    target: int | None = None,
) -> SolveOutcome:
    """Run one method on ``g`` and return a complete coloring of ``g``.

    With ``reduction`` the search runs on the reduced graph and the solution
    is lifted back; scores and optimality proofs carry over unchanged.
    ``target`` stops MCTS methods as soon as that score is reached.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    work, trace = reduce_graph(g) if reduction else (g, None)

    if method == "greedy":
        start = clock()
        s = greedy_coloring(work)
        elapsed = clock() - start
        result = RunResult(s.colors(), s.score, elapsed, False, 1, [(elapsed, s.score)], elapsed, s.score)
    elif method == "its":
        start = clock()
        s = greedy_coloring(work)
        trace_pts = [(clock() - start, s.score)]

        def improved(best):
            trace_pts.append((clock() - start, best.score))

        deadline = start + time_limit if time_limit else None
        iterations = its_iterations if not time_limit else 0
        best = its(s, (1 << work.n) - 1, iterations, random.Random(seed), deadline, clock, improved)
        result = RunResult(
            best.colors(), best.score, trace_pts[-1][0], False, 1, trace_pts, clock() - start, s.score
        )
    else:
        simulation = method.removeprefix("mcts-")
        cfg = MctsConfig(
            c=c,
            simulation=simulation,
            its_iterations=its_iterations,
            time_limit=time_limit,
            seed=seed,
            max_iterations=max_iterations,
            target=target,
        )
        result = run(work, cfg, clock)

    colors = _compact(result.best_colors)
    if trace is not None:
        colors = _compact(restore_solution(colors, trace, g))
    ok, why = check_coloring(g, colors)
    if not ok or coloring_score(g, colors) != result.best_score:
        raise RuntimeError(f"solver produced an inconsistent solution: {why or 'score mismatch'}")
    result.best_colors = colors
    return SolveOutcome(colors, result, work.n)


def _parse_seeds(text: str) -> list[int]:
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def _parse_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    instances: list[str] = field(default_factory=list)
    method: str = "mcts-greedy-random"
    seeds: list[int] = field(default_factory=lambda: list(range(1, 21)))
    time_limit: float = 3600.0
    c: float = 1.0
    its_iterations: int = 500
    reduction: bool = True
    max_iterations: int = 0
    workers: int = 1
    output: str = "runs.csv"
    aggregate: str = "aggregate.csv"

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read a flat ``key = value`` file; ``#`` starts a comment.

    Keys match the solve flags with dashes or underscores
    (``time-limit``, ``coef``, ``no-reduction``...). ``instances`` and
    ``seeds`` are comma separated; seeds accept ranges like ``1-20``.
    Relative instance paths resolve against the config file's directory.
    """
    base = Path(path).parent
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, line {lineno}")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key in ("instances", "instance"):
                values["instances"] = [str(base / p.strip()) for p in value.split(",") if p.strip()]
            elif key == "seeds":
                values["seeds"] = _parse_seeds(value)
            elif key == "seed":
                values["seeds"] = [int(value)]
            elif key in ("coef", "c"):
                values["c"] = float(value)
            elif key == "time_limit":
                values["time_limit"] = float(value)
            elif key in ("its_iterations", "max_iterations", "workers"):
                values[key] = int(value)
            elif key == "reduction":
                values["reduction"] = _parse_bool(value)
            elif key == "no_reduction":
                values["reduction"] = not _parse_bool(value)
            elif key in ("method", "output", "aggregate"):
                values[key] = value
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"{exc}, line {lineno}") from None
    return ExperimentConfig(**values)


@dataclass
class RunRecord:
    instance: str
    method: str
    seed: int
    best_score: int | None
    time_to_best_s: float
    total_time_s: float
    proven_optimal: bool
    iterations: int
    status: str = "ok"

    def row(self) -> dict[str, str]:
        return {
            "instance": self.instance,
            "method": self.method,
            "seed": str(self.seed),
            "best_score": "" if self.best_score is None else str(self.best_score),
            "time_to_best_s": f"{self.time_to_best_s:.2f}",
            "total_time_s": f"{self.total_time_s:.2f}",
            "proven_optimal": str(self.proven_optimal).lower(),
            "iterations": str(self.iterations),
            "status": self.status,
        }


@dataclass
class AggregateRow:
    instance: str
    method: str
    best: int | None
    avg: float | None
    t_best_avg: float | None
    proven_optimal_any: bool
    runs: int

    def row(self) -> dict[str, str]:
        return {
            "instance": self.instance,
            "method": self.method,
            "best": "" if self.best is None else str(self.best),
            "avg": "" if self.avg is None else f"{self.avg:.2f}",
            "t_best_avg": "" if self.t_best_avg is None else f"{self.t_best_avg:.2f}",
            "proven_optimal_any": str(self.proven_optimal_any).lower(),
            "runs": str(self.runs),
        }


def _one_run(args) -> RunRecord:
    name, g, cfg, seed, clock = args
    try:
        out = solve(
            g,
            cfg.method,
            seed=seed,
            time_limit=cfg.time_limit,
            c=cfg.c,
            its_iterations=cfg.its_iterations,
            reduction=cfg.reduction,
            max_iterations=cfg.max_iterations,
            clock=clock,
        )
    except Exception as exc:  # one bad run must not sink the experiment
        log.exception("run %s seed %s failed", name, seed)
        return RunRecord(name, cfg.method, seed, None, 0.0, 0.0, False, 0, f"failed: {exc}")
    r = out.result
    return RunRecord(name, cfg.method, seed, r.best_score, r.time_to_best, r.total_time, r.proven_optimal, r.iterations)


def aggregate(records: list[RunRecord]) -> list[AggregateRow]:
    """Best / mean / mean time-to-best per (instance, method), over successful runs."""
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.instance, r.method), []).append(r)
    rows = []
    for (inst, method), recs in groups.items():
        ok = [r for r in recs if r.status == "ok"]
        if ok:
            scores = [r.best_score for r in ok]
            rows.append(
                AggregateRow(
                    inst,
                    method,
                    min(scores),
                    statistics.fmean(scores),
                    statistics.fmean(r.time_to_best_s for r in ok),
                    any(r.proven_optimal for r in ok),
                    len(ok),
                )
            )
        else:
            rows.append(AggregateRow(inst, method, None, None, None, False, 0))
    return rows


def write_csv(path_or_buf, field_names: list[str], rows: list[dict[str, str]]) -> None:
    def dump(fh) -> None:
        writer = csv.DictWriter(fh, fieldnames=field_names, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    if isinstance(path_or_buf, io.TextIOBase):
        dump(path_or_buf)
    else:
        with open(path_or_buf, "w", newline="", encoding="utf-8") as fh:
            dump(fh)


def _instance_name(path: str) -> str:
    name = Path(path).name
    return name[:-4] if name.endswith(".col") else name


def run_experiment(
    config: ExperimentConfig,
    clock_factory: Callable[[], Callable[[], float]] | None = None,
    write: bool = True,
) -> tuple[list[RunRecord], list[AggregateRow]]:
    """Every (instance, seed) pair as an isolated run.

    Records come back in (instance, seed) order whatever the worker count.
    ``clock_factory`` builds one fresh clock per run (default: monotonic).
    """
    jobs = []
    failed: dict[int, RunRecord] = {}
    for path in config.instances:
        name = _instance_name(path)
        try:
            g = load_instance(path)
        except (OSError, ValueError) as exc:
            log.error("cannot read %s: %s", path, exc)
            for seed in config.seeds:
                failed[len(jobs)] = RunRecord(name, config.method, seed, None, 0.0, 0.0, False, 0, f"failed: {exc}")
                jobs.append(None)
            continue
        for seed in config.seeds:
            clock = clock_factory() if clock_factory is not None else time.monotonic
            jobs.append((name, g, config, seed, clock))

    todo = [j for j in jobs if j is not None]
    if config.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            done = list(pool.map(_one_run, todo))
    else:
        done = [_one_run(j) for j in todo]

    it = iter(done)
    records = [failed[i] if j is None else next(it) for i, j in enumerate(jobs)]
    agg = aggregate(records)
    if write:
        write_csv(config.output, RUN_FIELDS, [r.row() for r in records])
        write_csv(config.aggregate, AGGREGATE_FIELDS, [a.row() for a in agg])
    return records, agg


def read_runs(path: str | os.PathLike) -> list[RunRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                RunRecord(
                    row["instance"],
                    row["method"],
                    int(row["seed"]),
                    int(row["best_score"]) if row["best_score"] else None,
                    float(row["time_to_best_s"]),
                    float(row["total_time_s"]),
                    row["proven_optimal"] == "true",
                    int(row["iterations"]),
                    row["status"],
                )
            )
    return out


@dataclass
class SweepRow:
    c: float
    scores: list[int]

    def row(self) -> dict[str, str]:
        xs = sorted(self.scores)
        if len(xs) > 1:
            q1, med, q3 = statistics.quantiles(xs, n=4, method="inclusive")
        else:
            q1 = med = q3 = float(xs[0])
        return {
            "c": f"{self.c:g}",
            "runs": str(len(xs)),
            "min": str(xs[0]),
            "q1": f"{q1:.2f}",
            "median": f"{med:.2f}",
            "q3": f"{q3:.2f}",
            "max": str(xs[-1]),
            "mean": f"{statistics.fmean(xs):.2f}",
        }


def sweep_coefficient(
    instance: str | WeightedGraph,
    c_values: list[float],
    seeds: list[int],
    time_limit: float,
    method: str = "mcts-greedy-random",
    reduction: bool = True,
    max_iterations: int = 0,
    workers: int = 1,
    output: str | None = None,
) -> list[SweepRow]:
    """Best-score distribution per exploration coefficient, for box plots."""
    g = instance if isinstance(instance, WeightedGraph) else load_instance(instance)
    rows = []
    for c in c_values:
        if c < 0 or math.isnan(c):
            raise ValueError(f"invalid coefficient {c}")
        jobs = [
            (
                g.name,
                g,
                ExperimentConfig(
                    method=method,
                    seeds=seeds,
                    time_limit=time_limit,
                    c=c,
                    reduction=reduction,
                    max_iterations=max_iterations,
                ),
                seed,
                time.monotonic,
            )
            for seed in seeds
        ]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                recs = list(pool.map(_one_run, jobs))
        else:
            recs = [_one_run(j) for j in jobs]
        bad = [r for r in recs if r.status != "ok"]
        if bad:
            raise RuntimeError(f"sweep run failed: {bad[0].status}")
        rows.append(SweepRow(c, [r.best_score for r in recs]))
    if output is not None:
        write_csv(output, SWEEP_FIELDS, [r.row() for r in rows])
    return rows


@dataclass
class ValidationReport:
    ok: bool
    score: int | None
    declared: int | None
    problems: list[str]


def validate_solution(
    instance: str | os.PathLike, solution: str | os.PathLike, weights: str | os.PathLike | None = None
) -> ValidationReport:
    """Re-read an exported solution, check legality and the declared score."""
    g = load_instance(instance, weights)
    declared, colors = parse_solution(Path(solution).read_text(), g.n)
    problems = []
    ok, why = check_coloring(g, colors)
    if not ok:
        problems.append(why)
    actual = coloring_score(g, colors)
    if declared is None:
        problems.append("missing score header")
    elif declared != actual:
        problems.append(f"score mismatch: declared {declared}, recomputed {actual}")
    return ValidationReport(not problems, actual, declared, problems)


def write_trace(path: str | os.PathLike, trace: list[tuple[float, int]]) -> None:
    write_csv(path, ["time_s", "score"], [{"time_s": f"{t:.2f}", "score": str(s)} for t, s in trace])

