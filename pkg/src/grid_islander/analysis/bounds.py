# src/grid_islander/analysis/bounds.py
"""Guaranteed-gap bound, neighbor-gap certificate and contraction diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from grid_islander.core.grid import Grid, ImbalanceVector, Partition
from grid_islander.core.topology import condensed_graph, island_imbalances
from grid_islander.migration.state import Rule, RunReport

MW_TOL = 1e-6


@dataclass(frozen=True)
class BoundReport:
    p_bar: float
    p_star: float
    l_star: int
    bound: float
    # J(K) - J*, when a final cost is known
    gap: Optional[float] = None
    satisfied: Optional[bool] = None


def l_star(p_star: float, p_bar: float, n_mu: int) -> int:
    """
    Smallest island rank l with p* + p_bar (l - (n_mu + 1) / 2) >= 0, clamped to
    [1, n_mu]. An all-zero grid (p_bar = 0) is degenerate and yields 1.
    """
    if p_bar <= 0:
        return 1
    raw = math.ceil(-p_star / p_bar + (n_mu + 1) / 2 - 1e-12)
    return min(max(raw, 1), n_mu)


def bound_from_values(p_star: float, p_bar: float, n_mu: int) -> float:
    """
    Upper bound on J(K) - J* once neighboring islands differ by at most p_bar.

    The sum runs from l* itself: the ranks l*..n_mu are exactly the islands with a
    non-negative imbalance in the worst-case staircase. When every rank is negative
    the clamped l* = n_mu term is dropped and the sum is empty.
    """
    if n_mu < 1:
        raise ValueError("n_mu must be at least 1")
    ls = l_star(p_star, p_bar, n_mu)
    mid = (n_mu + 1) / 2
    total = sum(max(p_star + p_bar * (l - mid), 0.0) for l in range(ls, n_mu + 1))
    return (2.0 / n_mu) * total - (p_star + abs(p_star))


def lemma1_bound(
    grid: Grid, n_mu: int, final_cost: Optional[float] = None, tol: float = MW_TOL
) -> BoundReport:
    if n_mu < 2:
        raise ValueError("the bound needs n_mu >= 2")
    p_star = grid.p_total / n_mu
    p_bar = grid.p_bar
    bound = bound_from_values(p_star, p_bar, n_mu)
    gap = satisfied = None
    if final_cost is not None:
        gap = final_cost - abs(p_star)
        satisfied = gap <= bound + tol
    return BoundReport(
        p_bar=p_bar,
        p_star=p_star,
        l_star=l_star(p_star, p_bar, n_mu),
        bound=bound,
        gap=gap,
        satisfied=satisfied,
    )


def infer_p_bar(bound: float, p_star: float, n_mu: int, *, upper: float = 1e7) -> float:
    """Back-solve the largest nodal injection that a published bound implies."""

    def residual(p_bar: float) -> float:
        return bound_from_values(p_star, p_bar, n_mu) - bound

    lo, hi = 1e-9, max(1.0, abs(p_star))
    while residual(hi) < 0:
        hi *= 2
        if hi > upper:
            raise ValueError(f"no p_bar below {upper:g} MW reproduces bound {bound:g}")
    if residual(lo) > 0:
        raise ValueError(f"bound {bound:g} is below the zero-spread value for p*={p_star:g}")
    return float(brentq(residual, lo, hi, xtol=1e-9))


# ---------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------
def neighbor_gap_certificate(
    grid: Grid, part: Partition, tol: float = MW_TOL
) -> Tuple[float, bool]:
    """Largest imbalance gap across adjacent islands, and whether it stays within p_bar."""
    P = island_imbalances(grid, part)
    links = condensed_graph(grid, part).links
    gap = max((abs(P[a] - P[b]) for a, b in links), default=0.0)
    return gap, gap <= grid.p_bar + tol


def imbalance_stddev(imbalances: ImbalanceVector) -> float:
    return float(np.std(np.asarray(imbalances.values, dtype=float)))


@dataclass(frozen=True)
class ContractionStep:
    step: int
    bus: int
    via: str
    distance_before: float
    distance_after: float
    delta: float
    # p_i (P_l - P_m + p_i) before the move; negative for every improving move
    discriminant: float


def contraction_trace(report: RunReport) -> List[ContractionStep]:
    """Distance of the imbalance vector to the balanced target across every event."""
    out: List[ContractionStep] = []
    for idx, event in enumerate(report.events):
        before = ImbalanceVector(report.trajectory[idx].imbalances)
        after = ImbalanceVector(report.trajectory[idx + 1].imbalances)
        d0 = before.distance_to_target()
        d1 = after.distance_to_target()
        P_l, P_m = event.P_before
        out.append(
            ContractionStep(
                step=event.step,
                bus=event.bus,
                via=event.via.value,
                distance_before=d0,
                distance_after=d1,
                delta=d1 - d0,
                discriminant=event.p_i * (P_l - P_m + event.p_i),
            )
        )
    return out


def contraction_holds(trace: List[ContractionStep]) -> bool:
    for row in trace:
        if row.via == Rule.NORMAL.value and not (row.delta < 0 and row.discriminant < 0):
            return False
        if row.via == Rule.ZERO_POWER.value and row.delta != 0:
            return False
    return True
