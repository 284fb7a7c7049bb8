# tests/test_rules.py
from __future__ import annotations

import pytest

from grid_islander.core.grid import Partition, build_grid
from grid_islander.core.topology import island_imbalances
from grid_islander.migration import (
    SchedulerState,
    check_hypothesis,
    evaluate_migration,
    min_gain,
    select_target,
    zero_power_eligible,
)


def _star(p_center: float):
    # bus 1 sits in island 1 next to bus 2; bus 3 forms island 0
    grid = build_grid({1: p_center, 2: -54.26, 3: 190.75}, [(1, 2), (1, 3)])
    return grid, Partition(assignment=(1, 1, 0), n_mu=2)


def test_load_moves_toward_surplus() -> None:
    grid, part = _star(-20.0)
    decision = evaluate_migration(grid, part, 0, 1, 0, (-74.26, 190.75))
    assert decision.migrate
    assert decision.gain == pytest.approx(20.0)
    assert decision.predicted == pytest.approx((170.75, -54.26))


def test_passive_node_never_improves_the_pair() -> None:
    grid, part = _star(0.0)
    decision = evaluate_migration(grid, part, 0, 1, 0, (-54.26, 190.75))
    assert not decision.migrate
    assert decision.gain == pytest.approx(0.0)


def test_articulation_node_stays() -> None:
    grid = build_grid(
        {1: -20.0, 2: -30.0, 3: 190.75, 4: -24.26}, [(1, 2), (1, 3), (1, 4)]
    )
    part = Partition(assignment=(1, 1, 0, 1), n_mu=2)
    decision = evaluate_migration(grid, part, 0, 1, 0, (-74.26, 190.75))
    assert not decision.migrate
    assert decision.reason == "source island would split"


def test_singleton_island_is_never_emptied() -> None:
    grid = build_grid({1: -20.0, 2: -54.26, 3: 190.75}, [(1, 2), (2, 3)])
    part = Partition(assignment=(1, 0, 0), n_mu=2)
    decision = evaluate_migration(grid, part, 0, 1, 0, (-20.0, 136.49))
    assert not decision.migrate


@pytest.mark.parametrize(
    ("P_l", "P_m", "p_i", "expected"),
    [
        (-90.0, 100.0, 20.0, 20.0),
        (30.0, -20.0, 50.0, -50.0),
        (2.0, 5.0, 4.0, -1.0),
    ],
)
def test_min_gain(P_l, P_m, p_i, expected) -> None:
    assert min_gain(P_l, P_m, p_i) == pytest.approx(expected)


def test_select_target_prefers_largest_gain() -> None:
    assert select_target([(0, 5.0), (1, 0.0)], P_m=30.0, p_i=20.0) == 1


def test_select_target_breaks_ties_by_index() -> None:
    assert select_target([(2, -50.0), (0, -80.0)], P_m=100.0, p_i=20.0) == 0


def test_select_target_needs_candidates() -> None:
    with pytest.raises(ValueError):
        select_target([], P_m=1.0, p_i=1.0)


# ---------------------------------------------------------------------
# null-power rule
# ---------------------------------------------------------------------
@pytest.fixture
def zero_power_grid():
    return build_grid({1: 10.0, 2: 0.0, 3: -30.0, 4: 25.0}, [(1, 2), (2, 3), (3, 4)])


def test_zero_power_node_may_leave_unseen_island(zero_power_grid) -> None:
    state = SchedulerState.initial(zero_power_grid, Partition(assignment=(0, 0, 1, 1), n_mu=2))
    assert state.history == {1: ((0, 10.0),)}
    assert zero_power_eligible(state, 1, 1, -5.0)
    # staying put is not a move
    assert not zero_power_eligible(state, 1, 0, 10.0)


def test_zero_power_return_is_blocked_by_history(zero_power_grid) -> None:
    part = Partition(assignment=(0, 1, 1, 1), n_mu=2, step=1)
    state = SchedulerState(
        grid=zero_power_grid,
        partition=part,
        imbalances=island_imbalances(zero_power_grid, part),
        history={1: ((0, 10.0), (1, -5.0))},
    )
    assert not zero_power_eligible(state, 1, 0, 10.0)
    assert zero_power_eligible(state, 1, 0, 12.0)


# ---------------------------------------------------------------------
# convergence premise
# ---------------------------------------------------------------------
def test_balanced_islands_have_no_triplets() -> None:
    grid = build_grid({1: 5.0, 2: -5.0, 3: 5.0, 4: -5.0}, [(1, 2), (2, 3), (3, 4)])
    state = SchedulerState.initial(grid, Partition(assignment=(0, 0, 1, 1), n_mu=2))
    report = check_hypothesis(state)
    assert report.triplets == ()
    assert not report.holds


def test_six_node_triplets(six_node_grid, six_node_partition) -> None:
    report = check_hypothesis(SchedulerState.initial(six_node_grid, six_node_partition))
    assert report.triplets == ((1, 0, 2), (0, 1, 3))
    assert report.strict == report.triplets
    assert report.holds and report.progress_possible


def test_triplet_without_room_to_improve() -> None:
    grid = build_grid({1: 1.0, 2: 4.0, 3: 3.0, 4: -1.0}, [(1, 2), (2, 3), (3, 4)])
    report = check_hypothesis(
        SchedulerState.initial(grid, Partition(assignment=(0, 0, 1, 1), n_mu=2))
    )
    assert report.triplets == ((1, 0, 1),)
    assert report.strict == ()
    assert report.holds and not report.progress_possible
