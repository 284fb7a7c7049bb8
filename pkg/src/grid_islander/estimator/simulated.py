# src/grid_islander/estimator/simulated.py
from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, FrozenSet, Optional

from grid_islander.config import Tolerances
from grid_islander.core.grid import Grid, Partition
from grid_islander.core.topology import components

from .base import ConsensusRun, DecisionEstimate, IntegratorOptions, RunStatus
from .consensus import (
    build_auxiliary_graph,
    estimate_imbalance,
    integrate_consensus,
    steady_rates,
    write_trace,
)

logger = logging.getLogger(__name__)


class SimulatedEstimator:
    """
    Estimates island imbalances the way a boundary node does it: by running the two
    virtual consensus simulations (island and auxiliary graph) to steady state.

    Runs are memoized per vertex set; the grid is immutable, so the same vertex set
    always yields the same run.
    """

    name = "simulate"

    def __init__(
        self,
        integrator: IntegratorOptions | None = None,
        tolerances: Tolerances | None = None,
        trace_dir: str | Path | None = None,
        max_runs: int = 4096,
    ) -> None:
        self.tolerances = tolerances or Tolerances()
        self.integrator = integrator or IntegratorOptions(
            steady_tol=self.tolerances.steady,
            disagreement_tol=self.tolerances.disagreement,
            drift_tol=self.tolerances.drift,
        )
        self.trace_dir = Path(trace_dir) if trace_dir else None
        if self.trace_dir is not None:
            self.trace_dir.mkdir(parents=True, exist_ok=True)
            self.integrator = replace(self.integrator, trace=True)
        self.max_runs = max_runs
        self._runs: Dict[FrozenSet[int], ConsensusRun] = {}
        self._hits = 0
        self._integrated = 0
        self.equal_mean_misses = 0

    def consensus(self, grid: Grid, vertices: FrozenSet[int]) -> ConsensusRun:
        cached = self._runs.get(vertices)
        if cached is not None:
            self._hits += 1
            return cached
        run = integrate_consensus(grid, vertices, self.integrator)
        self._integrated += 1
        if self.trace_dir is not None:
            label = "-".join(str(grid.bus(h)) for h in run.vertices[:4])
            name = f"run{self._integrated:05d}_n{run.size}_{label}.csv"
            write_trace(run, self.trace_dir / name)
            run.trace = []
        if len(self._runs) >= self.max_runs:
            # oldest first: dicts keep insertion order
            del self._runs[next(iter(self._runs))]
        self._runs[vertices] = run
        return run

    def estimate(self, grid: Grid, part: Partition, i: int, l: int) -> DecisionEstimate:
        return estimate_for_decision(grid, part, i, l, estimator=self)

    def stats(self) -> Dict[str, int]:
        return {
            "consensus_runs": self._integrated,
            "cached_runs": len(self._runs),
            "cache_hits": self._hits,
            "equal_mean_misses": self.equal_mean_misses,
        }


def estimate_for_decision(
    grid: Grid,
    part: Partition,
    i: int,
    l: int,
    *,
    estimator: Optional[SimulatedEstimator] = None,
) -> DecisionEstimate:
    """
    Probe node i's estimate of island l: build the auxiliary graph, run both
    consensus simulations, read their steady rates and invert them.
    """
    est = estimator or SimulatedEstimator()
    aux = build_auxiliary_graph(grid, part, l, i)
    split = len(components(grid, aux.vertices)) > 1 if aux.vertices else False
    if not aux.vertices:
        # the probe is the island's only node; there is nothing to simulate
        return DecisionEstimate(l, i, aux.member, None, disagreement=False, split=False)

    run_island = est.consensus(grid, frozenset(part.members(l)))
    run_aux = est.consensus(grid, frozenset(aux.vertices))
    disagreement = run_aux.status is RunStatus.DISAGREEMENT

    if split and not disagreement:
        est.equal_mean_misses += 1
        logger.warning(
            "removing bus %d splits island %d into components with equal mean power; "
            "consensus disagreement did not fire",
            grid.bus(i),
            l,
        )
    if disagreement:
        return DecisionEstimate(l, i, aux.member, None, disagreement=True, split=split)

    rates = steady_rates(run_island, run_aux, i, aux.member)
    estimate = estimate_imbalance(rates, float(grid.p[i]), est.tolerances.singular)
    return DecisionEstimate(l, i, aux.member, estimate, disagreement=False, split=split)
