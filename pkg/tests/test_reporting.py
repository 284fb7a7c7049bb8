# tests/test_reporting.py
from __future__ import annotations

import csv
import json

import pytest

from grid_islander.migration import RunOptions, run
from grid_islander.reporting import (
    SCHEMA_VERSION,
    dumps_report,
    format_summary,
    report_to_dict,
    write_report,
    write_trajectory_csv,
)


@pytest.fixture
def six_node_report(six_node_grid, six_node_partition):
    return run(six_node_grid, six_node_partition, RunOptions(exact_imbalance=True))


def test_report_document(six_node_report, six_node_grid) -> None:
    doc = report_to_dict(six_node_report, six_node_grid)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["summary"] == {
        "K": 2,
        "J_initial": 95.0,
        "J_final": 25.0,
        "J_star": 5.0,
        "bound": 25.0,
        "bound_satisfied": True,
        "termination": "converged",
    }
    assert doc["initial_partition"] == {"0": [1, 2, 3], "1": [4, 5, 6]}
    assert doc["cut_set_initial"] == [[3, 4]]
    assert doc["cut_set_final"] == [[1, 2], [2, 3]]
    assert doc["events"][0]["bus"] == 3
    assert doc["events"][0]["via"] == "rule-normal"
    assert [pt["k"] for pt in doc["trajectory"]] == [0, 1, 2]


def test_written_report_parses(tmp_path, six_node_report, six_node_grid) -> None:
    out = tmp_path / "report.json"
    write_report(six_node_report, six_node_grid, out)
    text = out.read_text(encoding="utf-8")
    assert text == dumps_report(six_node_report, six_node_grid)
    assert json.loads(text)["summary"]["K"] == 2


def test_trajectory_csv(tmp_path, six_node_report) -> None:
    out = tmp_path / "trajectory.csv"
    write_trajectory_csv(six_node_report, out)
    with out.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "P_1", "P_2", "J", "J_star"]
    assert rows[1] == ["0", "100.0", "-90.0", "95.0", "5.0"]
    assert rows[-1] == ["2", "30.0", "-20.0", "25.0", "5.0"]


def test_summary_text(six_node_report) -> None:
    text = format_summary(six_node_report)
    assert "K = 2" in text
    assert "J(K) = 25.0000 MW" in text
    assert "bound = 25.0000 MW (satisfied: True)" in text
    assert "premise" not in text
