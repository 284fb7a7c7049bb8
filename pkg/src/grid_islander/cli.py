# src/grid_islander/cli.py
from __future__ import annotations

import argparse
import json
import logging
import sqlite3
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

from grid_islander.analysis import (
    DEFAULT_CAP,
    bound_from_values,
    brute_force_optimum,
    infer_p_bar,
    l_star,
    lemma1_bound,
)
from grid_islander.config import INTEGRATORS, Settings, Tolerances, configure_logging
from grid_islander.core.grid import Grid, Partition
from grid_islander.core.io import load_grid, save_grid, save_partition
from grid_islander.core.topology import cost_J, cost_lower_bound
from grid_islander.errors import GridIslanderError, InputError, PartitionError
from grid_islander.estimator import ESTIMATOR_CHOICES, make_estimator
from grid_islander.initpart import (
    load_cut_set_partition,
    load_partition,
    random_partition,
    read_groups,
    sspr_bfs,
)
from grid_islander.migration import MigrationScheduler
from grid_islander.persistence import RunStore
from grid_islander.reporting import (
    format_summary,
    report_to_dict,
    write_report,
    write_trajectory_csv,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------
def _parse_line(text: str) -> Tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split("-"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a line as 'A-B', got {text!r}") from None
    return a, b


def _load(args: argparse.Namespace) -> Grid:
    fmt = args.format or ("matpower" if Path(args.grid).suffix == ".m" else "native")
    grid = load_grid(args.grid, fmt, exclude_compensators=args.exclude_compensators)
    for line in getattr(args, "drop_line", None) or []:
        grid = grid.without_line(*line)
        logger.info("tripped line %d-%d before islanding", *line)
    return grid


def _initial_partition(args: argparse.Namespace, grid: Grid) -> Partition:
    if args.partition:
        part = load_partition(args.partition, grid)
    elif args.cut_set:
        part = load_cut_set_partition(args.cut_set, grid, args.n_mu)
    elif args.groups:
        part = sspr_bfs(grid, read_groups(args.groups, grid))
    else:
        if args.n_mu is None:
            raise PartitionError("--random-seed needs --n-mu")
        part = random_partition(grid, args.n_mu, args.random_seed)
    if args.n_mu is not None and part.n_mu != args.n_mu:
        raise PartitionError(f"initial partition has {part.n_mu} islands, expected {args.n_mu}")
    return part


def _tolerances(args: argparse.Namespace) -> Tolerances:
    tol = Tolerances()
    overrides = {
        "steady": args.steady_tol,
        "disagreement": args.disagreement_tol,
        "singular": args.singular_tol,
        "mw": args.mw_tol,
    }
    return replace(tol, **{k: v for k, v in overrides.items() if v is not None})


# ---------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------
def cmd_import(args: argparse.Namespace) -> int:
    grid = load_grid(args.source, "matpower", exclude_compensators=args.exclude_compensators)
    save_grid(grid, args.out)
    print(f"wrote {args.out}: n={grid.n} lines={len(grid.edges)} P_tot={grid.p_total:.4f} MW")
    return 0


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    grid = _load(args)
    init = _initial_partition(args, grid)
    tolerances = _tolerances(args)
    mode = "exact" if args.exact_imbalance else args.estimator
    estimator = make_estimator(
        mode, integrator=args.integrator, tolerances=tolerances, trace_dir=args.trace_dir
    )
    scheduler = MigrationScheduler(estimator, tolerances)
    report = scheduler.run(
        grid, init, step_cap=args.step_cap, monitor_hypothesis=not args.no_hypothesis
    )

    stem = f"{grid.name}_n{init.n_mu}"
    report_path = args.report or Path(f"{stem}_report.json")
    trajectory_path = args.trajectory or Path(f"{stem}_trajectory.csv")
    write_report(report, grid, report_path)
    write_trajectory_csv(report, trajectory_path)
    print(format_summary(report))
    print(f"report: {report_path}\ntrajectory: {trajectory_path}")

    if args.record:
        try:
            row_id = RunStore(args.db or settings.db_path).save_run(report_to_dict(report, grid))
            print(f"recorded as run {row_id}")
        except (sqlite3.Error, OSError):
            logger.exception("failed to record run in the ledger (continuing)")
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    if args.grid:
        grid = _load(args)
        rep = lemma1_bound(grid, args.n_mu)
        p_star, p_bar, bound = rep.p_star, rep.p_bar, rep.bound
        print(f"grid {grid.name}: J* = {cost_lower_bound(grid, args.n_mu):.4f} MW")
    else:
        if args.p_star is None:
            raise InputError("give a grid file or --p-star")
        p_star = args.p_star
        if args.infer_from is not None:
            p_bar = infer_p_bar(args.infer_from, p_star, args.n_mu)
            print(f"inferred p_bar = {p_bar:.4f} MW")
        elif args.p_bar is not None:
            p_bar = args.p_bar
        else:
            raise InputError("give --p-bar or --infer-from with --p-star")
        bound = bound_from_values(p_star, p_bar, args.n_mu)
    print(f"p_star = {p_star:.4f} MW  p_bar = {p_bar:.4f} MW  n_mu = {args.n_mu}")
    print(f"l* = {l_star(p_star, p_bar, args.n_mu)}")
    print(f"bound = {bound:.4f} MW")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    grid = _load(args)
    result = brute_force_optimum(grid, args.n_mu, cap=args.cap)
    print(f"grid {grid.name}: n={grid.n} n_mu={args.n_mu}")
    print(f"enumerated = {result.enumerated_count}")
    j_star = cost_lower_bound(grid, args.n_mu)
    print(f"optimal J  = {result.optimal_J:.4f} MW (J* = {j_star:.4f} MW)")
    for part in result.optimal_partitions:
        print(json.dumps(part.to_buses(grid), sort_keys=True))
    return 0


def cmd_seed(args: argparse.Namespace) -> int:
    grid = _load(args)
    if args.method == "sspr":
        if not args.groups:
            raise InputError("--method sspr needs --groups")
        part = sspr_bfs(grid, read_groups(args.groups, grid))
    elif args.method == "cut-set":
        if not args.cut_set:
            raise InputError("--method cut-set needs --cut-set")
        part = load_cut_set_partition(args.cut_set, grid, args.n_mu)
    else:
        if args.n_mu is None:
            raise InputError("--method random needs --n-mu")
        part = random_partition(grid, args.n_mu, args.seed)
    save_partition(part, grid, args.out)
    print(f"wrote {args.out}: n_mu={part.n_mu} J(0)={cost_J(grid, part):.4f} MW")
    return 0


def cmd_history(args: argparse.Namespace, settings: Settings) -> int:
    store = RunStore(args.db or settings.db_path)
    if args.json:
        print(store.export_json(limit=args.limit))
        return 0
    for rec in store.fetch_recent(limit=args.limit, grid_name=args.grid_name):
        bound = "-" if rec.bound is None else f"{rec.bound:.2f}"
        print(
            f"{rec.id:>5} {rec.created_at} {rec.grid_name} n_mu={rec.n_mu} K={rec.steps} "
            f"J(0)={rec.j_initial:.2f} J(K)={rec.j_final:.2f} J*={rec.j_star:.2f} "
            f"bound={bound} {rec.termination}"
        )
    return 0


# ---------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------
def _add_grid_args(p: argparse.ArgumentParser, *, optional: bool = False) -> None:
    if optional:
        p.add_argument("grid", nargs="?", help="grid file (native JSON or MATPOWER .m)")
    else:
        p.add_argument("grid", help="grid file (native JSON or MATPOWER .m)")
    p.add_argument("--format", choices=("native", "matpower"), help="default: by suffix")
    p.add_argument(
        "--exclude-compensators",
        action="store_true",
        help="MATPOWER: generators with PMAX <= 0 do not make a bus a generator",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grid-islander",
        description="Split a power grid into islands by self-organizing node migration.",
    )
    parser.add_argument("--log-level", help="overrides GRID_ISLANDER_LOG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", help="convert a MATPOWER case to the native format")
    p.add_argument("source")
    p.add_argument("out")
    p.add_argument("--exclude-compensators", action="store_true")

    p = sub.add_parser("run", help="run the migration from an initial partition")
    _add_grid_args(p)
    p.add_argument("--n-mu", type=int)
    init = p.add_mutually_exclusive_group(required=True)
    init.add_argument("--groups", type=Path, help="generator groups JSON (sspr seeding)")
    init.add_argument("--partition", type=Path, help="partition JSON")
    init.add_argument("--cut-set", type=Path, help="cut-set text file")
    init.add_argument("--random-seed", type=int, help="random partition seed")
    p.add_argument("--drop-line", type=_parse_line, action="append", metavar="A-B")
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES)
    p.add_argument("--exact-imbalance", action="store_true", help="skip estimation")
    p.add_argument("--integrator", choices=INTEGRATORS)
    p.add_argument("--steady-tol", type=float)
    p.add_argument("--disagreement-tol", type=float)
    p.add_argument("--singular-tol", type=float)
    p.add_argument("--mw-tol", type=float)
    p.add_argument("--step-cap", type=int, help="default: 50 * n")
    p.add_argument("--no-hypothesis", action="store_true", help="skip premise monitoring")
    p.add_argument("--trace-dir", type=Path, help="write consensus traces as CSV here")
    p.add_argument("--report", type=Path)
    p.add_argument("--trajectory", type=Path)
    p.add_argument("--record", action="store_true", help="append a row to the run ledger")
    p.add_argument("--db", type=Path, help="overrides GRID_ISLANDER_DB")

    p = sub.add_parser("bound", help="evaluate the guaranteed-gap bound")
    _add_grid_args(p, optional=True)
    p.add_argument("--n-mu", type=int, required=True)
    p.add_argument("--p-star", type=float)
    p.add_argument("--p-bar", type=float)
    p.add_argument("--infer-from", type=float, metavar="BOUND", help="back-solve p_bar")

    p = sub.add_parser("oracle", help="exhaustive optimum for small grids")
    _add_grid_args(p)
    p.add_argument("--n-mu", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = sub.add_parser("seed", help="write an initial partition")
    _add_grid_args(p)
    p.add_argument("--method", choices=("sspr", "random", "cut-set"), required=True)
    p.add_argument("--n-mu", type=int)
    p.add_argument("--groups", type=Path)
    p.add_argument("--cut-set", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("history", help="list recorded runs")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--grid", dest="grid_name")
    p.add_argument("--json", action="store_true")
    p.add_argument("--db", type=Path)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = Settings.from_env()
    configure_logging(args.log_level or settings.log_level)
    try:
        if args.command == "import":
            return cmd_import(args)
        if args.command == "run":
            return cmd_run(args, settings)
        if args.command == "bound":
            return cmd_bound(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        if args.command == "seed":
            return cmd_seed(args)
        return cmd_history(args, settings)
    except GridIslanderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
