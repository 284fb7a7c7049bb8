# src/grid_islander/migration/rules.py
"""Migration conditions evaluated by a single boundary node."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

from grid_islander.core.grid import Grid, Partition
from grid_islander.core.topology import (
    articulation_vertices,
    boundary_nodes,
    is_connected_without,
)

from .state import SchedulerState

MW_TOL = 1e-6

Triplet = Tuple[int, int, int]


@dataclass(frozen=True)
class MigrationDecision:
    migrate: bool
    reason: str
    # (P_l, P_m) after the move, whether or not it happens
    predicted: Tuple[float, float] = (float("nan"), float("nan"))
    gain: float = 0.0


def min_gain(P_l: float, P_m: float, p_i: float) -> float:
    """Rise of the smaller imbalance of the pair if the node moves from m to l."""
    return min(P_l + p_i, P_m - p_i) - min(P_l, P_m)


def evaluate_migration(
    grid: Grid,
    part: Partition,
    i: int,
    m: int,
    l: int,
    estimates: Tuple[float, float],
    *,
    connected: Optional[bool] = None,
    tol: float = MW_TOL,
) -> MigrationDecision:
    """
    Normal rule: node i moves from m to l iff the smaller imbalance of the pair
    strictly rises and island m stays connected without i.

    `estimates` is (P_m, P_l). `connected` may be passed in when the caller already
    knows whether m survives the removal of i.
    """
    P_m, P_l = estimates
    p_i = float(grid.p[i])
    predicted = (P_l + p_i, P_m - p_i)
    gain = min_gain(P_l, P_m, p_i)

    if len(part.members(m)) == 1:
        return MigrationDecision(False, "node is the only member of its island", predicted, gain)
    if gain <= tol:
        return MigrationDecision(False, "smaller imbalance would not rise", predicted, gain)
    if connected is None:
        connected = is_connected_without(grid, part, m, i)
    if not connected:
        return MigrationDecision(False, "source island would split", predicted, gain)
    return MigrationDecision(True, "smaller imbalance rises", predicted, gain)


def select_target(candidates: Sequence[Tuple[int, float]], P_m: float, p_i: float) -> int:
    """Island with the largest rise of the pair minimum; ties go to the lowest index."""
    if not candidates:
        raise ValueError("select_target needs at least one candidate island")
    best_l, best_gain = None, float("-inf")
    for l, P_l in sorted(candidates):
        gain = min_gain(P_l, P_m, p_i)
        if gain > best_gain:
            best_l, best_gain = l, gain
    assert best_l is not None
    return best_l


def zero_power_eligible(
    state: SchedulerState,
    i: int,
    l: int,
    P_l: float,
    *,
    connected: Optional[bool] = None,
    tol: float = MW_TOL,
) -> bool:
    """
    Null-power rule: the source island must stay connected, and island l must not
    show an imbalance that node i already saw while it belonged to l.
    """
    part = state.partition
    m = part.island_of(i)
    if l == m or len(part.members(m)) == 1:
        return False
    if connected is None:
        connected = is_connected_without(state.grid, part, m, i)
    if not connected:
        return False
    for island, seen in state.history.get(i, ()):
        if island == l and abs(seen - P_l) <= tol:
            return False
    return True


# ---------------------------------------------------------------------
# Convergence premise
# ---------------------------------------------------------------------
@dataclass(frozen=True)
class HypothesisReport:
    """
    Triplets (l, m, i) with i in island m on the border of l, m connected without i,
    and a sign pattern that moves power toward the poorer island. `strict` keeps the
    triplets whose node is also small enough to improve the pair.
    """

    step: int
    triplets: Tuple[Triplet, ...]
    strict: Tuple[Triplet, ...]

    @property
    def holds(self) -> bool:
        return bool(self.triplets)

    @property
    def progress_possible(self) -> bool:
        return bool(self.strict)


def check_hypothesis(state: SchedulerState, tol: float = MW_TOL) -> HypothesisReport:
    grid, part, P = state.grid, state.partition, state.imbalances
    cut_vertices: Dict[int, FrozenSet[int]] = {}
    triplets = []
    strict = []
    for i, targets in boundary_nodes(grid, part).items():
        m = part.island_of(i)
        if len(part.members(m)) == 1:
            continue
        if m not in cut_vertices:
            cut_vertices[m] = articulation_vertices(grid, part, m)
        if i in cut_vertices[m]:
            continue
        p_i = float(grid.p[i])
        for l in targets:
            load_to_surplus = P[l] > P[m] + tol and p_i < -tol
            generation_to_deficit = P[l] < P[m] - tol and p_i > tol
            if not (load_to_surplus or generation_to_deficit):
                continue
            triplets.append((l, m, i))
            if abs(P[m] - P[l]) > abs(p_i) + tol:
                strict.append((l, m, i))
    return HypothesisReport(step=state.k, triplets=tuple(triplets), strict=tuple(strict))
