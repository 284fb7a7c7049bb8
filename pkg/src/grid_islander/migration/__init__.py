# src/grid_islander/migration/__init__.py
from __future__ import annotations

from .rules import (
    HypothesisReport,
    MigrationDecision,
    check_hypothesis,
    evaluate_migration,
    min_gain,
    select_target,
    zero_power_eligible,
)
from .scheduler import STEP_CAP_FACTOR, MigrationScheduler, RunOptions, run, step
from .state import (
    MigrationEvent,
    Rule,
    RunReport,
    SchedulerState,
    Termination,
    TrajectoryPoint,
)

__all__ = [
    "HypothesisReport",
    "MigrationDecision",
    "MigrationEvent",
    "MigrationScheduler",
    "Rule",
    "RunOptions",
    "RunReport",
    "STEP_CAP_FACTOR",
    "SchedulerState",
    "Termination",
    "TrajectoryPoint",
    "check_hypothesis",
    "evaluate_migration",
    "min_gain",
    "run",
    "select_target",
    "step",
    "zero_power_eligible",
]
