"""Command line entry point: ``wvcp solve|bench|sweep|oracle|validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .coloring import format_solution
from .graph import InstanceError, load_instance
from .oracle import DEFAULT_CAP, OracleCapExceeded, exact_optimum


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _cmd_solve(args) -> int:
    g = load_instance(args.instance, args.weights)
    out = bench.solve(
        g,
        args.method,
        seed=args.seed,
        time_limit=args.time_limit,
        c=args.coef,
        its_iterations=args.its_iterations,
        reduction=not args.no_reduction,
        max_iterations=args.max_iterations,
        target=args.target,
    )
    r = out.result
    print(f"instance        {g.name} ({g.n} vertices, {out.reduced_n} after reduction)")
    print(f"method          {args.method}")
    print(f"score           {r.best_score}")
    print(f"time to best    {r.time_to_best:.2f} s")
    print(f"total time      {r.total_time:.2f} s")
    print(f"iterations      {r.iterations}")
    print(f"proven optimal  {'yes' if r.proven_optimal else 'no'}")
    if args.export_solution:
        with open(args.export_solution, "w") as fh:
            fh.write(format_solution(g, out.colors))
    if args.trace:
        bench.write_trace(args.trace, r.score_trace)
    return 0


def _cmd_bench(args) -> int:
    cfg = bench.load_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    records, agg = bench.run_experiment(cfg)
    for a in agg:
        row = a.row()
        print(f"{row['instance']:<24} {row['method']:<20} best {row['best']:>8} avg {row['avg']:>10} t(s) {row['t_best_avg']:>8}")
    failed = sum(r.status != "ok" for r in records)
    print(f"{len(records)} runs, {failed} failed; per-run CSV {cfg.output}, aggregate CSV {cfg.aggregate}")
    return 1 if failed else 0


def _cmd_sweep(args) -> int:
    rows = bench.sweep_coefficient(
        args.instance,
        _floats(args.coefs),
        bench._parse_seeds(args.seeds),
        args.time_limit,
        method=args.method,
        reduction=not args.no_reduction,
        max_iterations=args.max_iterations,
        workers=args.workers,
        output=args.output,
    )
    for r in rows:
        row = r.row()
        print(f"c={row['c']:<5} min {row['min']} q1 {row['q1']} median {row['median']} q3 {row['q3']} max {row['max']}")
    return 0


def _cmd_oracle(args) -> int:
    g = load_instance(args.instance, args.weights)
    try:
        res = exact_optimum(g, cap=args.cap)
    except OracleCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"optimum {res.optimum} ({res.nodes_explored} nodes)")
    sys.stdout.write(format_solution(g, res.colors))
    return 0


def _cmd_validate(args) -> int:
    rep = bench.validate_solution(args.instance, args.solution, args.weights)
    if rep.ok:
        print(f"ok, score {rep.score}")
        return 0
    for p in rep.problems:
        print(f"violation: {p}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wvcp", description="Weighted vertex coloring by Monte Carlo Tree Search")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    s.add_argument("--weights", help="weight file (default <instance>.w)")
    s.add_argument("--method", choices=bench.METHODS, default="mcts-greedy-random")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--time-limit", type=float, default=3600.0, help="seconds, 0 = none")
    s.add_argument("--coef", type=float, default=1.0, help="exploration coefficient")
    s.add_argument("--its-iterations", type=int, default=500)
    s.add_argument("--max-iterations", type=int, default=0, help="MCTS iteration cap, 0 = none")
    s.add_argument("--target", type=int, help="stop MCTS once this score is reached")
    s.add_argument("--no-reduction", action="store_true")
    s.add_argument("--export-solution", metavar="PATH")
    s.add_argument("--trace", metavar="PATH", help="write time_s,score improvements as CSV")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="multi-instance, multi-seed experiment")
    b.add_argument("--config", required=True)
    b.add_argument("--workers", type=int)
    b.set_defaults(func=_cmd_bench)

    w = sub.add_parser("sweep", help="exploration coefficient sweep")
    w.add_argument("instance")
    w.add_argument("--coefs", default="0,0.5,1,1.5,2")
    w.add_argument("--seeds", default="1-20")
    w.add_argument("--time-limit", type=float, default=3600.0)
    w.add_argument("--method", choices=bench.METHODS, default="mcts-greedy-random")
    w.add_argument("--max-iterations", type=int, default=0)
    w.add_argument("--no-reduction", action="store_true")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--output", default="sweep.csv")
    w.set_defaults(func=_cmd_sweep)

    o = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    o.add_argument("instance")
    o.add_argument("--weights")
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.set_defaults(func=_cmd_oracle)

    v = sub.add_parser("validate", help="check an exported solution")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--weights")
    v.set_defaults(func=_cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
