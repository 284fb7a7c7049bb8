# src/grid_islander/migration/state.py
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Tuple

from grid_islander.core.grid import Edge, Grid, ImbalanceVector, Partition
from grid_islander.core.topology import island_imbalances


class Rule(Enum):
    NORMAL = "rule-normal"
    ZERO_POWER = "rule-zero-power"


class Termination(Enum):
    CONVERGED = "converged"
    STEP_CAP = "step-cap"
    # a partition was revisited; the run would cycle
    STALLED = "stalled"


@dataclass(frozen=True)
class MigrationEvent:
    """
    Node `node` moved from island `from_island` (m) to `to_island` (l) at step k.
    Imbalance pairs are ordered (P_l, P_m).
    """

    step: int
    node: int
    bus: int
    from_island: int
    to_island: int
    p_i: float
    P_before: Tuple[float, float]
    P_after: Tuple[float, float]
    via: Rule


History = Mapping[int, Tuple[Tuple[int, float], ...]]


@dataclass(frozen=True)
class SchedulerState:
    """
    Snapshot of the migration process at step k.

    `history[i]` lists (island, imbalance) pairs observed while zero-power node i was
    a member of that island; it only grows.
    """

    grid: Grid
    partition: Partition
    imbalances: ImbalanceVector
    history: History
    sweep_cursor: int = 0

    @property
    def k(self) -> int:
        return self.partition.step

    @classmethod
    def initial(cls, grid: Grid, part: Partition) -> "SchedulerState":
        imbalances = island_imbalances(grid, part)
        history = {
            i: ((part.island_of(i), imbalances[part.island_of(i)]),)
            for i in range(grid.n)
            if grid.p[i] == 0.0
        }
        return cls(grid=grid, partition=part, imbalances=imbalances, history=history)


@dataclass(frozen=True)
class TrajectoryPoint:
    k: int
    imbalances: Tuple[float, ...]
    J: float


@dataclass
class RunReport:
    grid_name: str
    n_mu: int
    trajectory: List[TrajectoryPoint]
    events: List[MigrationEvent]
    initial_partition: Partition
    final_partition: Partition
    cut_set_initial: List[Edge]
    cut_set_final: List[Edge]
    termination: Termination
    J_star: float
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def K(self) -> int:
        return len(self.trajectory) - 1

    @property
    def J_initial(self) -> float:
        return self.trajectory[0].J

    @property
    def J_final(self) -> float:
        return self.trajectory[-1].J
