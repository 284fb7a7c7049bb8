# tests/test_analysis.py
from __future__ import annotations

import math

import pytest

from grid_islander.analysis import (
    bound_from_values,
    contraction_holds,
    contraction_trace,
    imbalance_stddev,
    infer_p_bar,
    l_star,
    lemma1_bound,
    neighbor_gap_certificate,
)
from grid_islander.core.grid import ImbalanceVector, Partition
from grid_islander.migration import RunOptions, run


@pytest.mark.parametrize(
    ("p_star", "p_bar", "n_mu", "expected"),
    [
        (58.25, 542.78, 2, 213.14),
        (38.83, 542.78, 3, 335.9667),
        (0.0, 1.0, 2, 0.5),
        (5.0, 60.0, 2, 25.0),
    ],
)
def test_bound_values(p_star, p_bar, n_mu, expected) -> None:
    assert bound_from_values(p_star, p_bar, n_mu) == pytest.approx(expected, abs=1e-3)


def test_bound_is_zero_when_every_rank_is_in_deficit() -> None:
    assert bound_from_values(-1000.0, 1.0, 3) == 0.0


@pytest.mark.parametrize(
    ("p_star", "p_bar", "n_mu", "expected"),
    [
        (5.0, 60.0, 2, 2),
        (0.0, 1.0, 2, 2),
        (1000.0, 1.0, 3, 1),
        (-1000.0, 1.0, 3, 3),
        (3.0, 0.0, 4, 1),
    ],
)
def test_l_star(p_star, p_bar, n_mu, expected) -> None:
    assert l_star(p_star, p_bar, n_mu) == expected


@pytest.mark.parametrize(
    ("bound", "p_star", "n_mu", "expected"),
    [
        (1254.95, 102.92, 3, 1985.35),
        (1908.2, 77.187, 4, 1985.39),
    ],
)
def test_infer_p_bar(bound, p_star, n_mu, expected) -> None:
    assert infer_p_bar(bound, p_star, n_mu) == pytest.approx(expected, abs=0.05)


def test_infer_p_bar_rejects_unreachable_bound() -> None:
    with pytest.raises(ValueError):
        infer_p_bar(-1.0, 5.0, 2)


def test_bound_report_for_six_node_grid(six_node_grid) -> None:
    report = lemma1_bound(six_node_grid, 2, final_cost=25.0)
    assert report.p_bar == 60.0
    assert report.p_star == 5.0
    assert report.l_star == 2
    assert report.bound == pytest.approx(25.0)
    assert report.gap == pytest.approx(20.0)
    assert report.satisfied


def test_bound_needs_two_islands(six_node_grid) -> None:
    with pytest.raises(ValueError):
        lemma1_bound(six_node_grid, 1)


def test_neighbor_gap_certificate(six_node_grid, six_node_partition) -> None:
    assert neighbor_gap_certificate(six_node_grid, six_node_partition) == (190.0, False)
    final = Partition(assignment=(1, 0, 1, 1, 1, 1), n_mu=2)
    assert neighbor_gap_certificate(six_node_grid, final) == (50.0, True)


def test_imbalance_stddev() -> None:
    assert imbalance_stddev(ImbalanceVector((30.0, -20.0))) == pytest.approx(25.0)
    assert imbalance_stddev(ImbalanceVector((7.0, 7.0, 7.0))) == 0.0


def test_contraction_trace(six_node_grid, six_node_partition) -> None:
    report = run(six_node_grid, six_node_partition, RunOptions(exact_imbalance=True))
    trace = contraction_trace(report)
    assert [row.bus for row in trace] == [3, 1]
    assert trace[0].distance_before == pytest.approx(95.0 * math.sqrt(2))
    assert trace[0].distance_after == pytest.approx(75.0 * math.sqrt(2))
    assert trace[1].distance_after == pytest.approx(25.0 * math.sqrt(2))
    assert trace[0].discriminant == pytest.approx(-3400.0)
    assert all(row.delta < 0 for row in trace)
    assert contraction_holds(trace)


def test_l_star_is_monotone() -> None:
    p_bar, n_mu = 100.0, 5
    ranks = [l_star(p, p_bar, n_mu) for p in (300.0, 120.0, 0.0, -120.0, -300.0)]
    assert ranks == sorted(ranks)
    spreads = [l_star(-50.0, pb, n_mu) for pb in (10.0, 50.0, 200.0, 1000.0)]
    assert spreads == sorted(spreads, reverse=True)


def test_stddev_of_opposite_pair_is_its_magnitude() -> None:
    assert imbalance_stddev(ImbalanceVector((40.0, -40.0))) == pytest.approx(40.0)
    # seeding that spreads imbalance more evenly has the smaller deviation
    assert imbalance_stddev(ImbalanceVector((6.11, 129.98, 172.65))) > imbalance_stddev(
        ImbalanceVector((6.11, 145.98, 156.65))
    )
