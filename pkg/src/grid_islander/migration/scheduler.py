# src/grid_islander/migration/scheduler.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from grid_islander.config import Tolerances
from grid_islander.core.grid import Grid, ImbalanceVector, Partition
from grid_islander.core.topology import (
    boundary_nodes,
    cost_lower_bound,
    cut_set,
    island_imbalances,
    validate_partition,
)
from grid_islander.errors import (
    ImbalanceDriftError,
    PartitionError,
    SchedulerInvariantError,
)
from grid_islander.estimator import ImbalanceEstimator, TruthEstimator, make_estimator

from .rules import check_hypothesis, evaluate_migration, select_target, zero_power_eligible
from .state import (
    MigrationEvent,
    Rule,
    RunReport,
    SchedulerState,
    Termination,
    TrajectoryPoint,
)

logger = logging.getLogger(__name__)

STEP_CAP_FACTOR = 50


@dataclass
class RunOptions:
    # None -> STEP_CAP_FACTOR * n
    step_cap: Optional[int] = None
    # None -> make_estimator() (environment driven)
    estimator: Optional[ImbalanceEstimator] = None
    exact_imbalance: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    monitor_hypothesis: bool = True


class MigrationScheduler:
    """
    Serializes the self-organizing migration: one node moves per step.

    Boundary nodes are swept in ascending id order starting at the cursor left by
    the previous event. A full sweep of the normal rule comes first; the null-power
    rule is only tried when that sweep finds nothing.
    """

    def __init__(
        self,
        estimator: ImbalanceEstimator | None = None,
        tolerances: Tolerances | None = None,
    ) -> None:
        self.tolerances = tolerances or Tolerances()
        self.estimator = estimator or make_estimator(tolerances=self.tolerances)

    # -----------------------------------------------------------------
    # single step
    # -----------------------------------------------------------------
    def step(self, state: SchedulerState) -> Tuple[SchedulerState, Optional[MigrationEvent]]:
        grid, part = state.grid, state.partition
        boundary = boundary_nodes(grid, part)
        order = _sweep_order(sorted(boundary), state.sweep_cursor)

        for i in order:
            if grid.p[i] == 0.0:
                continue
            target = self._normal_target(state, i, boundary[i])
            if target is not None:
                return self._apply(state, i, target, Rule.NORMAL)

        for i in order:
            if grid.p[i] != 0.0:
                continue
            target = self._zero_power_target(state, i, boundary[i])
            if target is not None:
                return self._apply(state, i, target, Rule.ZERO_POWER)

        return state, None

    def _normal_target(
        self, state: SchedulerState, i: int, islands: Tuple[int, ...]
    ) -> Optional[int]:
        grid, part = state.grid, state.partition
        m = part.island_of(i)
        if len(part.members(m)) == 1:
            return None
        own = self.estimator.estimate(grid, part, i, m)
        if not own.usable or own.split:
            return None
        assert own.estimate is not None
        P_m = own.estimate.P_hat

        candidates: List[Tuple[int, float]] = []
        for l in islands:
            est = self.estimator.estimate(grid, part, i, l)
            if est.usable:
                assert est.estimate is not None
                candidates.append((l, est.estimate.P_hat))
        if not candidates:
            return None

        l = select_target(candidates, P_m, float(grid.p[i]))
        P_l = dict(candidates)[l]
        decision = evaluate_migration(
            grid, part, i, m, l, (P_m, P_l), connected=True, tol=self.tolerances.mw
        )
        logger.debug(
            "bus %d: island %d -> %d %s (gain %.6f MW)",
            grid.bus(i),
            m,
            l,
            "accepted" if decision.migrate else "rejected",
            decision.gain,
        )
        return l if decision.migrate else None

    def _zero_power_target(
        self, state: SchedulerState, i: int, islands: Tuple[int, ...]
    ) -> Optional[int]:
        grid, part = state.grid, state.partition
        m = part.island_of(i)
        if len(part.members(m)) == 1:
            return None
        own = self.estimator.estimate(grid, part, i, m)
        if own.split:
            return None
        for l in islands:
            est = self.estimator.estimate(grid, part, i, l)
            if not est.usable:
                continue
            assert est.estimate is not None
            if zero_power_eligible(
                state, i, l, est.estimate.P_hat, connected=True, tol=self.tolerances.mw
            ):
                return l
        return None

    # -----------------------------------------------------------------
    # bookkeeping
    # -----------------------------------------------------------------
    def _apply(
        self, state: SchedulerState, i: int, l: int, via: Rule
    ) -> Tuple[SchedulerState, MigrationEvent]:
        grid = state.grid
        m = state.partition.island_of(i)
        p_i = float(grid.p[i])
        before = (state.imbalances[l], state.imbalances[m])

        part = state.partition.moved(i, l)
        imbalances = state.imbalances.transferred(l, m, p_i)
        self._check_drift(grid, part, imbalances)
        try:
            validate_partition(grid, part)
        except PartitionError as exc:
            raise SchedulerInvariantError(
                f"moving bus {grid.bus(i)} to island {l} broke the partition: {exc}"
            ) from exc

        after = (imbalances[l], imbalances[m])
        if via is Rule.NORMAL:
            if not min(after) > min(before):
                raise SchedulerInvariantError(
                    f"step {state.k}: smaller imbalance did not rise "
                    f"({min(before):.6f} -> {min(after):.6f} MW)"
                )
            if p_i * (before[0] - before[1] + p_i) >= 0:
                raise SchedulerInvariantError(
                    f"step {state.k}: move of bus {grid.bus(i)} does not approach the target"
                )
        elif p_i != 0.0:
            raise SchedulerInvariantError(
                f"step {state.k}: null-power rule applied to bus {grid.bus(i)} with p={p_i!r} MW"
            )

        event = MigrationEvent(
            step=state.k,
            node=i,
            bus=grid.bus(i),
            from_island=m,
            to_island=l,
            p_i=p_i,
            P_before=before,
            P_after=after,
            via=via,
        )
        logger.info(
            "step %d: bus %d moves from island %d to island %d (p=%.3f MW, %s)",
            event.step,
            event.bus,
            m,
            l,
            p_i,
            via.value,
        )
        new_state = SchedulerState(
            grid=grid,
            partition=part,
            imbalances=imbalances,
            history=self._record_history(state, part, imbalances, (l, m)),
            sweep_cursor=(i + 1) % grid.n,
        )
        return new_state, event

    def _check_drift(self, grid: Grid, part: Partition, imbalances: ImbalanceVector) -> None:
        truth = island_imbalances(grid, part)
        limit = self.tolerances.drift * (1.0 + float(np.abs(grid.p).sum()))
        for l, (kept, true) in enumerate(zip(imbalances.values, truth.values)):
            if abs(kept - true) > limit:
                raise ImbalanceDriftError(
                    f"island {l}: bookkeeping {kept!r} MW vs recomputed {true!r} MW"
                )

    def _record_history(
        self,
        state: SchedulerState,
        part: Partition,
        imbalances: ImbalanceVector,
        touched: Tuple[int, int],
    ) -> Dict[int, Tuple[Tuple[int, float], ...]]:
        history = dict(state.history)
        for island in touched:
            value = imbalances[island]
            for h in part.members(island):
                if h not in history:
                    continue
                seen = history[h]
                if any(
                    isl == island and abs(v - value) <= self.tolerances.mw for isl, v in seen
                ):
                    continue
                history[h] = seen + ((island, value),)
        return history

    # -----------------------------------------------------------------
    # full run
    # -----------------------------------------------------------------
    def run(
        self,
        grid: Grid,
        init: Partition,
        *,
        step_cap: Optional[int] = None,
        monitor_hypothesis: bool = True,
    ) -> RunReport:
        validate_partition(grid, init)
        if init.n_mu < 2:
            raise PartitionError(f"need at least two islands, got {init.n_mu}")
        cap = STEP_CAP_FACTOR * grid.n if step_cap is None else step_cap
        if cap < 0:
            raise ValueError("step cap must be non-negative")

        init = Partition(assignment=init.assignment, n_mu=init.n_mu, step=0)
        state = SchedulerState.initial(grid, init)
        trajectory = [_point(state)]
        events: List[MigrationEvent] = []
        violations: List[int] = []
        visited: Set[Tuple[int, ...]] = {init.assignment}

        while True:
            if state.k >= cap:
                termination = Termination.STEP_CAP
                logger.warning("run stopped at the step cap (%d steps)", cap)
                break
            new_state, event = self.step(state)
            if event is None:
                termination = Termination.CONVERGED
                break
            # premise of the convergence theorem, checked on every state the run leaves
            if monitor_hypothesis and not check_hypothesis(state, self.tolerances.mw).holds:
                violations.append(state.k)
                logger.info("step %d: no node satisfies the convergence premise", state.k)
            if new_state.partition.assignment in visited:
                termination = Termination.STALLED
                logger.warning(
                    "step %d: moving bus %d would revisit an earlier partition", state.k, event.bus
                )
                break
            visited.add(new_state.partition.assignment)
            state = new_state
            events.append(event)
            trajectory.append(_point(state))

        final = state.partition
        report = RunReport(
            grid_name=grid.name,
            n_mu=init.n_mu,
            trajectory=trajectory,
            events=events,
            initial_partition=init,
            final_partition=final,
            cut_set_initial=cut_set(grid, init),
            cut_set_final=cut_set(grid, final),
            termination=termination,
            J_star=cost_lower_bound(grid, init.n_mu),
        )
        report.diagnostics["hypothesis_violations"] = violations
        if monitor_hypothesis:
            final_check = check_hypothesis(state, self.tolerances.mw)
            report.diagnostics["final_hypothesis"] = {
                "triplets": len(final_check.triplets),
                "strict": len(final_check.strict),
            }
        report.diagnostics["estimator"] = {"name": self.estimator.name, **self.estimator.stats()}

        from grid_islander.analysis import attach_diagnostics

        attach_diagnostics(grid, report, tol=self.tolerances.mw)
        logger.info(
            "run finished (%s): K=%d J(0)=%.4f J(K)=%.4f J*=%.4f",
            termination.value,
            report.K,
            report.J_initial,
            report.J_final,
            report.J_star,
        )
        return report


def _sweep_order(nodes: List[int], cursor: int) -> List[int]:
    return [i for i in nodes if i >= cursor] + [i for i in nodes if i < cursor]


def _point(state: SchedulerState) -> TrajectoryPoint:
    return TrajectoryPoint(
        k=state.k, imbalances=state.imbalances.values, J=state.imbalances.cost()
    )


# ---------------------------------------------------------------------
# Functional entry points
# ---------------------------------------------------------------------
def _scheduler(opts: RunOptions) -> MigrationScheduler:
    if opts.exact_imbalance:
        estimator: ImbalanceEstimator = TruthEstimator()
    else:
        estimator = opts.estimator or make_estimator(tolerances=opts.tolerances)
    return MigrationScheduler(estimator, opts.tolerances)


def step(
    state: SchedulerState, opts: RunOptions | None = None
) -> Tuple[SchedulerState, Optional[MigrationEvent]]:
    return _scheduler(opts or RunOptions()).step(state)


def run(grid: Grid, init: Partition, opts: RunOptions | None = None) -> RunReport:
    opts = opts or RunOptions()
    return _scheduler(opts).run(
        grid, init, step_cap=opts.step_cap, monitor_hypothesis=opts.monitor_hypothesis
    )
