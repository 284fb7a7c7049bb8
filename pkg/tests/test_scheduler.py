# tests/test_scheduler.py
from __future__ import annotations

import logging
import time

import numpy as np
import pytest

from grid_islander.core.grid import Partition, build_grid
from grid_islander.errors import PartitionError
from grid_islander.estimator import SimulatedEstimator, TruthEstimator
from grid_islander.initpart import random_partition
from grid_islander.migration import (
    MigrationScheduler,
    Rule,
    RunOptions,
    SchedulerState,
    Termination,
    check_hypothesis,
    run,
    step,
)
from grid_islander.reporting import dumps_report


@pytest.fixture(params=["simulate", "exact"])
def scheduler(request) -> MigrationScheduler:
    estimator = SimulatedEstimator() if request.param == "simulate" else TruthEstimator()
    return MigrationScheduler(estimator)


def test_first_move_of_six_node_grid(six_node_grid, six_node_partition) -> None:
    state = SchedulerState.initial(six_node_grid, six_node_partition)
    new_state, event = step(state, RunOptions(exact_imbalance=True))
    assert event is not None
    assert (event.bus, event.from_island, event.to_island) == (3, 0, 1)
    assert event.via is Rule.NORMAL
    assert event.P_before == (-90.0, 100.0)
    assert event.P_after == (-70.0, 80.0)
    assert new_state.imbalances.values == (80.0, -70.0)
    assert new_state.k == 1 and new_state.sweep_cursor == 3
    # the input state is left untouched
    assert state.partition.assignment == (0, 0, 0, 1, 1, 1)


def test_six_node_run(scheduler, six_node_grid, six_node_partition) -> None:
    report = scheduler.run(six_node_grid, six_node_partition)
    assert report.termination is Termination.CONVERGED
    assert report.K == 2
    assert [ev.bus for ev in report.events] == [3, 1]
    assert report.final_partition.assignment == (1, 0, 1, 1, 1, 1)
    assert [pt.imbalances for pt in report.trajectory] == [
        (100.0, -90.0),
        (80.0, -70.0),
        (30.0, -20.0),
    ]
    assert report.J_initial == pytest.approx(95.0)
    assert report.J_final == pytest.approx(25.0)
    assert report.J_star == pytest.approx(5.0)

    diag = report.diagnostics
    assert diag["bound"]["bound"] == pytest.approx(25.0)
    assert diag["bound"]["satisfied"] is True
    assert diag["certificate"] == {"max_neighbor_gap": 50.0, "satisfied": True}
    assert diag["hypothesis_violations"] == []
    assert diag["final_hypothesis"] == {"triplets": 0, "strict": 0}
    assert diag["bound_claimed"] is True
    assert diag["contraction_holds"] is True


def test_run_is_deterministic(six_node_grid, six_node_partition) -> None:
    first = run(six_node_grid, six_node_partition, RunOptions(estimator=SimulatedEstimator()))
    second = run(six_node_grid, six_node_partition, RunOptions(estimator=SimulatedEstimator()))
    assert dumps_report(first, six_node_grid) == dumps_report(second, six_node_grid)


def test_zero_step_cap(six_node_grid, six_node_partition, caplog) -> None:
    with caplog.at_level(logging.WARNING):
        opts = RunOptions(step_cap=0, exact_imbalance=True)
        report = run(six_node_grid, six_node_partition, opts)
    assert report.K == 0
    assert report.termination is Termination.STEP_CAP
    assert report.final_partition.assignment == six_node_partition.assignment
    assert "step cap" in caplog.text


def test_negative_step_cap_is_rejected(six_node_grid, six_node_partition) -> None:
    with pytest.raises(ValueError):
        run(six_node_grid, six_node_partition, RunOptions(step_cap=-1, exact_imbalance=True))


def test_converged_input_takes_no_steps(six_node_grid) -> None:
    part = Partition(assignment=(1, 0, 1, 1, 1, 1), n_mu=2)
    report = run(six_node_grid, part, RunOptions(exact_imbalance=True))
    assert report.K == 0
    assert report.termination is Termination.CONVERGED
    assert report.trajectory[0].imbalances == (30.0, -20.0)


def test_no_progress_possible_without_strict_triplet() -> None:
    grid = build_grid({1: 1.0, 2: 4.0, 3: 3.0, 4: -1.0}, [(1, 2), (2, 3), (3, 4)])
    report = run(grid, Partition(assignment=(0, 0, 1, 1), n_mu=2), RunOptions())
    assert report.K == 0
    assert report.termination is Termination.CONVERGED


def test_zero_power_node_moves_once(scheduler) -> None:
    grid = build_grid({1: 10.0, 2: 0.0, 3: -30.0, 4: 25.0}, [(1, 2), (2, 3), (3, 4)])
    report = scheduler.run(grid, Partition(assignment=(0, 0, 1, 1), n_mu=2))
    assert report.K == 1
    assert report.events[0].via is Rule.ZERO_POWER
    assert report.events[0].bus == 2
    assert report.final_partition.assignment == (0, 1, 1, 1)
    assert report.J_final == report.J_initial
    assert report.termination is Termination.CONVERGED
    assert report.diagnostics["contraction"][0]["delta"] == 0.0


def test_tiny_nonzero_power_goes_through_normal_rule(scheduler) -> None:
    grid = build_grid({1: 10.0, 2: 5e-7, 3: -30.0, 4: 25.0}, [(1, 2), (2, 3), (3, 4)])
    report = scheduler.run(grid, Partition(assignment=(0, 0, 1, 1), n_mu=2))
    # gain of 5e-7 MW is under the comparison tolerance, so bus 2 stays put
    assert report.events == []
    assert report.K == 0
    assert report.termination is Termination.CONVERGED
    assert report.diagnostics["contraction_holds"] is True
    assert SchedulerState.initial(grid, report.final_partition).history == {}


@pytest.mark.parametrize(
    "part",
    [
        Partition(assignment=(0, 0, 1, 1, 0, 1), n_mu=2),
        Partition(assignment=(0, 0, 0, 0, 0, 0), n_mu=1),
        Partition(assignment=(0, 0, 0, 1, 1), n_mu=2),
    ],
)
def test_invalid_initial_partition(six_node_grid, part) -> None:
    with pytest.raises(PartitionError):
        run(six_node_grid, part, RunOptions(exact_imbalance=True))


def test_exact_runs_converge_on_random_grids(make_random_grid) -> None:
    rng = np.random.default_rng(7)
    for trial in range(100):
        grid = make_random_grid(12, rng)
        n_mu = 2 + trial % 2
        init = random_partition(grid, n_mu, seed=trial)
        report = run(grid, init, RunOptions(exact_imbalance=True))

        assert report.termination is Termination.CONVERGED
        assert len(report.trajectory) == report.K + 1
        assert report.diagnostics["contraction_holds"]
        assert report.diagnostics["final_hypothesis"]["strict"] == 0
        distances = [row["distance_after"] for row in report.diagnostics["contraction"]]
        assert distances == sorted(distances, reverse=True)


def test_simulated_and_exact_runs_agree(make_random_grid) -> None:
    rng = np.random.default_rng(11)
    for trial in range(5):
        grid = make_random_grid(10, rng)
        init = random_partition(grid, 3, seed=trial)
        simulated = run(grid, init, RunOptions(estimator=SimulatedEstimator()))
        exact = run(grid, init, RunOptions(exact_imbalance=True))
        assert simulated.final_partition.assignment == exact.final_partition.assignment
        assert simulated.K == exact.K


def test_final_state_has_no_strict_triplet(six_node_grid, six_node_partition) -> None:
    report = run(six_node_grid, six_node_partition, RunOptions(exact_imbalance=True))
    final = SchedulerState.initial(six_node_grid, report.final_partition)
    assert check_hypothesis(final).strict == ()


@pytest.mark.parametrize(("mode", "limit_s"), [("simulate", 60.0), ("exact", 2.0)])
def test_three_hundred_node_run_time(make_random_grid, record_property, mode, limit_s) -> None:
    grid = make_random_grid(300, np.random.default_rng(300))
    init = random_partition(grid, 4, seed=300)
    estimator = SimulatedEstimator() if mode == "simulate" else TruthEstimator()
    start = time.perf_counter()
    report = MigrationScheduler(estimator).run(grid, init)
    elapsed = time.perf_counter() - start
    record_property(f"{mode}_seconds", round(elapsed, 3))
    assert report.termination is Termination.CONVERGED
    assert elapsed < limit_s
