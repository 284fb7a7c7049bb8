# src/grid_islander/estimator/base.py
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Protocol, Tuple

import numpy as np

from grid_islander.core.grid import Edge, Grid, Partition


class RunStatus(Enum):
    RUNNING = "running"
    STEADY = "steady"
    DISAGREEMENT = "disagreement"


class Condition(Enum):
    WELL_POSED = "well-posed"
    SINGULAR = "singular"


@dataclass(frozen=True)
class AuxiliaryGraph:
    """Island l with the probe removed (member probe) or added (neighbor probe)."""

    island: int
    probe: int
    member: bool
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]


@dataclass(frozen=True)
class IntegratorOptions:
    method: str = "euler"
    # None -> 1 / (d_max + 1) over the vertex set
    dt: Optional[float] = None
    steady_tol: float = 1e-9
    disagreement_tol: float = 1e-6
    drift_tol: float = 1e-9
    max_steps: int = 2**48
    trace: bool = False


@dataclass(eq=False)
class ConsensusRun:
    """
    One virtual consensus simulation  xdot = p - L x  from x(0) = 0.

    `component_rates` holds the mean rate of every connected component of the
    vertex set; `trace` holds (t, node, x, xdot) rows at each steady-state check.
    """

    vertices: Tuple[int, ...]
    x: np.ndarray
    xdot: np.ndarray
    t: float
    dt: float
    steps: int
    status: RunStatus
    component_rates: Tuple[float, ...]
    fiedler: float
    trace: List[Tuple[float, int, float, float]] = field(default_factory=list)

    @property
    def rate(self) -> float:
        """Consensus rate: the mean of the steady virtual derivatives."""
        return float(self.xdot.mean())

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class RateEstimate:
    omega: float
    omega_hat: float
    # -1 when the probe belongs to the island, +1 otherwise
    a_l: int


@dataclass(frozen=True)
class ImbalanceEstimate:
    P_hat: float
    size_hat: float
    size_rounded: int
    condition: Condition

    @property
    def well_posed(self) -> bool:
        return self.condition is Condition.WELL_POSED


SINGULAR_ESTIMATE = ImbalanceEstimate(
    P_hat=float("nan"), size_hat=float("nan"), size_rounded=0, condition=Condition.SINGULAR
)


@dataclass(frozen=True)
class DecisionEstimate:
    """What a probing node learns about one island before deciding to migrate."""

    island: int
    probe: int
    member: bool
    estimate: Optional[ImbalanceEstimate]
    # component rates of the auxiliary run disagreed (split warning)
    disagreement: bool
    # the auxiliary vertex set is structurally disconnected
    split: bool

    @property
    def usable(self) -> bool:
        return self.estimate is not None and self.estimate.well_posed


class ImbalanceEstimator(Protocol):
    """Pluggable backend producing a probe's view of an island's imbalance."""

    name: str

    def estimate(self, grid: Grid, part: Partition, i: int, l: int) -> DecisionEstimate: ...

    def stats(self) -> Dict[str, int]: ...
