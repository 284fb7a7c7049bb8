# src/grid_islander/estimator/exact.py
from __future__ import annotations

from typing import Dict

from grid_islander.config import Tolerances
from grid_islander.core.grid import Grid, Partition
from grid_islander.core.topology import components, island_imbalance

from .base import Condition, DecisionEstimate, ImbalanceEstimate, RateEstimate
from .consensus import build_auxiliary_graph, estimate_imbalance


def closed_form_rates(grid: Grid, part: Partition, i: int, l: int) -> RateEstimate:
    """Steady consensus rates without integrating: the means of p over both vertex sets."""
    aux = build_auxiliary_graph(grid, part, l, i)
    members = list(part.members(l))
    omega = float(grid.p[members].mean())
    omega_hat = float(grid.p[list(aux.vertices)].mean())
    return RateEstimate(omega=omega, omega_hat=omega_hat, a_l=-1 if aux.member else 1)


class ClosedFormEstimator:
    """
    Oracle mode: same inversion as the simulated estimator, fed with closed-form
    rates. Agrees with simulation to within the steady-state tolerance.
    """

    name = "oracle"

    def __init__(self, tolerances: Tolerances | None = None) -> None:
        self.tolerances = tolerances or Tolerances()
        self._calls = 0

    def estimate(self, grid: Grid, part: Partition, i: int, l: int) -> DecisionEstimate:
        self._calls += 1
        aux = build_auxiliary_graph(grid, part, l, i)
        if not aux.vertices:
            return DecisionEstimate(l, i, aux.member, None, disagreement=False, split=False)
        comps = components(grid, aux.vertices)
        split = len(comps) > 1
        means = [float(grid.p[list(c)].mean()) for c in comps]
        disagreement = split and max(means) - min(means) > self.tolerances.disagreement
        if disagreement:
            return DecisionEstimate(l, i, aux.member, None, disagreement=True, split=True)
        rates = closed_form_rates(grid, part, i, l)
        estimate = estimate_imbalance(rates, float(grid.p[i]), self.tolerances.singular)
        return DecisionEstimate(l, i, aux.member, estimate, disagreement=False, split=split)

    def stats(self) -> Dict[str, int]:
        return {"estimates": self._calls}


class TruthEstimator:
    """Bypasses estimation: reports the true island imbalance, never singular."""

    name = "exact"

    def __init__(self) -> None:
        self._calls = 0

    def estimate(self, grid: Grid, part: Partition, i: int, l: int) -> DecisionEstimate:
        self._calls += 1
        member = part.island_of(i) == l
        members = part.members(l)
        rest = [h for h in members if h != i] if member else []
        split = len(components(grid, rest)) > 1 if rest else False
        estimate = ImbalanceEstimate(
            P_hat=island_imbalance(grid, part, l),
            size_hat=float(len(members)),
            size_rounded=len(members),
            condition=Condition.WELL_POSED,
        )
        return DecisionEstimate(l, i, member, estimate, disagreement=split, split=split)

    def stats(self) -> Dict[str, int]:
        return {"estimates": self._calls}
