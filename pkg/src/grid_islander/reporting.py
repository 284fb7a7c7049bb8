# src/grid_islander/reporting.py
"""Run report serialization: a versioned JSON document and a trajectory CSV."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from grid_islander.core.grid import Edge, Grid
from grid_islander.migration.state import RunReport

SCHEMA_VERSION = 1


def _bus_pairs(grid: Grid, edges: Sequence[Edge]) -> List[List[int]]:
    pairs = []
    for i, j in edges:
        a, b = grid.bus(i), grid.bus(j)
        pairs.append([min(a, b), max(a, b)])
    return sorted(pairs)


def report_to_dict(report: RunReport, grid: Grid) -> Dict[str, Any]:
    """Plain-JSON view of a run; contains no timestamps so equal runs serialize equally."""
    bound = report.diagnostics.get("bound", {})
    return {
        "schema_version": SCHEMA_VERSION,
        "grid": report.grid_name,
        "n_mu": report.n_mu,
        "summary": {
            "K": report.K,
            "J_initial": report.J_initial,
            "J_final": report.J_final,
            "J_star": report.J_star,
            "bound": bound.get("bound"),
            "bound_satisfied": bound.get("satisfied"),
            "termination": report.termination.value,
        },
        "initial_partition": report.initial_partition.to_buses(grid),
        "final_partition": report.final_partition.to_buses(grid),
        "cut_set_initial": _bus_pairs(grid, report.cut_set_initial),
        "cut_set_final": _bus_pairs(grid, report.cut_set_final),
        "trajectory": [
            {"k": pt.k, "imbalances": list(pt.imbalances), "J": pt.J} for pt in report.trajectory
        ],
        "events": [
            {
                "step": ev.step,
                "bus": ev.bus,
                "from_island": ev.from_island,
                "to_island": ev.to_island,
                "p_i": ev.p_i,
                "P_before": list(ev.P_before),
                "P_after": list(ev.P_after),
                "via": ev.via.value,
            }
            for ev in report.events
        ],
        "diagnostics": report.diagnostics,
    }


def dumps_report(report: RunReport, grid: Grid) -> str:
    return json.dumps(report_to_dict(report, grid), indent=2, sort_keys=True) + "\n"


def write_report(report: RunReport, grid: Grid, path: str | Path) -> None:
    Path(path).write_text(dumps_report(report, grid), encoding="utf-8")


def write_trajectory_csv(report: RunReport, path: str | Path) -> None:
    """Columns k, P_1..P_n_mu, J, J_star (islands numbered from 1)."""
    header = ["k", *(f"P_{l + 1}" for l in range(report.n_mu)), "J", "J_star"]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for pt in report.trajectory:
            values = [*pt.imbalances, pt.J, report.J_star]
            writer.writerow([pt.k, *(repr(v) for v in values)])


def format_summary(report: RunReport) -> str:
    bound = report.diagnostics.get("bound", {})
    lines = [
        f"grid {report.grid_name}: n_mu={report.n_mu} termination={report.termination.value}",
        f"K = {report.K}",
        f"J(0) = {report.J_initial:.4f} MW",
        f"J(K) = {report.J_final:.4f} MW",
        f"J*   = {report.J_star:.4f} MW",
    ]
    if bound:
        lines.append(f"bound = {bound['bound']:.4f} MW (satisfied: {bound['satisfied']})")
    if report.diagnostics.get("hypothesis_violations"):
        lines.append(
            "convergence premise failed at steps "
            f"{report.diagnostics['hypothesis_violations'][:10]}; bound not claimed"
        )
    return "\n".join(lines)
