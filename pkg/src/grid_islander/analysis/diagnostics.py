# src/grid_islander/analysis/diagnostics.py
from __future__ import annotations

from dataclasses import asdict

from grid_islander.core.grid import Grid, ImbalanceVector
from grid_islander.migration.state import RunReport

from .bounds import (
    MW_TOL,
    contraction_holds,
    contraction_trace,
    imbalance_stddev,
    lemma1_bound,
    neighbor_gap_certificate,
)


def attach_diagnostics(grid: Grid, report: RunReport, tol: float = MW_TOL) -> RunReport:
    """Fill `report.diagnostics` with the bound, the certificate and the contraction trace."""
    bound = lemma1_bound(grid, report.n_mu, final_cost=report.J_final, tol=tol)
    gap, certified = neighbor_gap_certificate(grid, report.final_partition, tol)
    trace = contraction_trace(report)
    violations = report.diagnostics.get("hypothesis_violations", [])

    report.diagnostics["bound"] = asdict(bound)
    report.diagnostics["certificate"] = {"max_neighbor_gap": gap, "satisfied": certified}
    # the bound is only claimed when its premises held throughout the run
    report.diagnostics["bound_claimed"] = bool(certified and not violations)
    report.diagnostics["contraction"] = [asdict(row) for row in trace]
    report.diagnostics["contraction_holds"] = contraction_holds(trace)
    report.diagnostics["stddev"] = {
        "initial": imbalance_stddev(ImbalanceVector(report.trajectory[0].imbalances)),
        "final": imbalance_stddev(ImbalanceVector(report.trajectory[-1].imbalances)),
    }
    return report
