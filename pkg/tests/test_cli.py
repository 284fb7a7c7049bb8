# tests/test_cli.py
from __future__ import annotations

import json

import pytest

from grid_islander import cli
from grid_islander.core.grid import build_grid
from grid_islander.core.io import load_grid, save_grid
from grid_islander.errors import SchedulerInvariantError

CASE3 = """function mpc = case3
mpc.baseMVA = 100;
mpc.bus = [
\t1\t3\t0\t0\t0\t0\t1\t1\t0\t135\t1\t1.05\t0.95;
\t2\t1\t60\t10\t0\t0\t1\t1\t0\t135\t1\t1.05\t0.95;
\t3\t1\t30\t5\t0\t0\t1\t1\t0\t135\t1\t1.05\t0.95;
];
mpc.gen = [
\t1\t100\t0\t300\t-300\t1\t100\t1\t250\t10;
];
mpc.branch = [
\t1\t2\t0.01\t0.05\t0\t250\t250\t250\t0\t0\t1\t-360\t360;
\t2\t3\t0.01\t0.05\t0\t250\t250\t250\t0\t0\t1\t-360\t360;
];
"""


@pytest.fixture
def grid_file(tmp_path, six_node_grid):
    path = tmp_path / "six.json"
    save_grid(six_node_grid, path)
    return path


@pytest.fixture
def cut_file(tmp_path):
    path = tmp_path / "cut.txt"
    path.write_text("3-4\n", encoding="utf-8")
    return path


def test_import_matpower(tmp_path, capsys) -> None:
    src = tmp_path / "case3.m"
    src.write_text(CASE3, encoding="utf-8")
    out = tmp_path / "case3.json"
    assert cli.main(["import", str(src), str(out)]) == 0
    grid = load_grid(out)
    assert list(grid.p) == [100.0, -60.0, -30.0]
    assert "n=3 lines=2" in capsys.readouterr().out


def test_run_writes_report_and_trajectory(grid_file, cut_file, tmp_path, capsys) -> None:
    code = cli.main(
        ["run", str(grid_file), "--cut-set", str(cut_file), "--n-mu", "2", "--exact-imbalance"]
    )
    assert code == 0
    report = json.loads((tmp_path / "six_n2_report.json").read_text(encoding="utf-8"))
    assert report["summary"]["K"] == 2
    assert report["final_partition"] == {"0": [2], "1": [1, 3, 4, 5, 6]}
    assert (tmp_path / "six_n2_trajectory.csv").exists()
    assert "K = 2" in capsys.readouterr().out


def test_run_with_simulated_estimator(grid_file, cut_file, tmp_path) -> None:
    report_path = tmp_path / "out.json"
    code = cli.main(
        [
            "run",
            str(grid_file),
            "--cut-set",
            str(cut_file),
            "--estimator",
            "simulate",
            "--integrator",
            "rk4",
            "--trace-dir",
            str(tmp_path / "traces"),
            "--report",
            str(report_path),
        ]
    )
    assert code == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["diagnostics"]["estimator"]["name"] == "simulate"
    assert report["summary"]["J_final"] == 25.0
    assert list((tmp_path / "traces").glob("*.csv"))


def test_run_records_and_history_lists(grid_file, cut_file, tmp_path, capsys) -> None:
    db = tmp_path / "runs.db"
    args = ["run", str(grid_file), "--cut-set", str(cut_file), "--exact-imbalance"]
    assert cli.main([*args, "--record", "--db", str(db)]) == 0
    assert "recorded as run 1" in capsys.readouterr().out

    assert cli.main(["history", "--db", str(db)]) == 0
    out = capsys.readouterr().out
    assert "six n_mu=2 K=2" in out and "converged" in out

    assert cli.main(["history", "--db", str(db), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["steps"] == 2


def test_run_after_dropping_a_line(grid_file, tmp_path) -> None:
    code = cli.main(
        [
            "run",
            str(grid_file),
            "--random-seed",
            "3",
            "--n-mu",
            "2",
            "--drop-line",
            "1-3",
            "--exact-imbalance",
            "--report",
            str(tmp_path / "r.json"),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))
    assert report["grid"] == "six-1-3"


def test_bound_from_values(capsys) -> None:
    assert cli.main(["bound", "--p-star", "58.25", "--p-bar", "542.78", "--n-mu", "2"]) == 0
    out = capsys.readouterr().out
    assert "bound = 213.1400 MW" in out
    assert "l* = 2" in out


def test_bound_infers_p_bar(capsys) -> None:
    argv = ["bound", "--p-star", "102.92", "--infer-from", "1254.95", "--n-mu", "3"]
    assert cli.main(argv) == 0
    assert "inferred p_bar = 1985.3" in capsys.readouterr().out


def test_bound_for_grid(grid_file, capsys) -> None:
    assert cli.main(["bound", str(grid_file), "--n-mu", "2"]) == 0
    out = capsys.readouterr().out
    assert "J* = 5.0000 MW" in out and "bound = 25.0000 MW" in out


def test_oracle(tmp_path, capsys) -> None:
    path = tmp_path / "path3.json"
    save_grid(build_grid({1: 1.0, 2: 0.0, 3: -1.0}, [(1, 2), (2, 3)], name="path3"), path)
    assert cli.main(["oracle", str(path), "--n-mu", "2"]) == 0
    out = capsys.readouterr().out
    assert "optimal J  = 1.0000 MW" in out
    assert '{"0": [1], "1": [2, 3]}' in out


def test_seed_from_cut_set(grid_file, cut_file, tmp_path) -> None:
    out = tmp_path / "part.json"
    argv = ["seed", str(grid_file), "--method", "cut-set", "--cut-set", str(cut_file)]
    assert cli.main([*argv, "--out", str(out)]) == 0
    assert json.loads(out.read_text(encoding="utf-8")) == {"0": [1, 2, 3], "1": [4, 5, 6]}


def test_input_errors_exit_with_2(grid_file, tmp_path, capsys) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"0": [1, 2, 5], "1": [3, 4, 6]}), encoding="utf-8")
    assert cli.main(["run", str(grid_file), "--partition", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err

    assert cli.main(["run", str(tmp_path / "missing.json"), "--random-seed", "1"]) == 2
    assert cli.main(["seed", str(grid_file), "--method", "random", "--out", "x.json"]) == 2


def test_computation_errors_exit_with_1(grid_file, cut_file, monkeypatch) -> None:
    def broken(self, grid, init, **kwargs):
        raise SchedulerInvariantError("boom")

    monkeypatch.setattr(cli.MigrationScheduler, "run", broken)
    argv = ["run", str(grid_file), "--cut-set", str(cut_file), "--exact-imbalance"]
    assert cli.main(argv) == 1
