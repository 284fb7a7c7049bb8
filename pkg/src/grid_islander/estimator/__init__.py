# src/grid_islander/estimator/__init__.py
from __future__ import annotations

from pathlib import Path
from typing import Optional

from grid_islander.config import ESTIMATOR_MODES, Settings, Tolerances

from .base import (
    AuxiliaryGraph,
    Condition,
    ConsensusRun,
    DecisionEstimate,
    ImbalanceEstimate,
    ImbalanceEstimator,
    IntegratorOptions,
    RateEstimate,
    RunStatus,
)
from .consensus import (
    build_auxiliary_graph,
    estimate_imbalance,
    integrate_consensus,
    steady_rates,
)
from .exact import ClosedFormEstimator, TruthEstimator
from .simulated import SimulatedEstimator, estimate_for_decision

ESTIMATOR_CHOICES = ESTIMATOR_MODES


def make_estimator(
    mode: Optional[str] = None,
    *,
    integrator: Optional[str] = None,
    tolerances: Optional[Tolerances] = None,
    trace_dir: Optional[Path] = None,
) -> ImbalanceEstimator:
    """Factory choosing the estimator backend.

    Falls back to the environment (GRID_ISLANDER_ESTIMATOR / GRID_ISLANDER_INTEGRATOR)
    when arguments are omitted; the default integrates the consensus dynamics.
    """
    settings = Settings.from_env() if mode is None or integrator is None else None
    mode = (mode or (settings.estimator if settings else "simulate")).lower()
    tol = tolerances or Tolerances()
    if mode == "exact":
        return TruthEstimator()
    if mode == "oracle":
        return ClosedFormEstimator(tol)
    if mode != "simulate":
        raise ValueError(f"unknown estimator mode {mode!r}; choose from {ESTIMATOR_CHOICES}")
    method = integrator or (settings.integrator if settings else "euler")
    options = IntegratorOptions(
        method=method,
        steady_tol=tol.steady,
        disagreement_tol=tol.disagreement,
        drift_tol=tol.drift,
    )
    return SimulatedEstimator(options, tol, trace_dir=trace_dir)


__all__ = [
    "AuxiliaryGraph",
    "ClosedFormEstimator",
    "Condition",
    "ConsensusRun",
    "DecisionEstimate",
    "ESTIMATOR_CHOICES",
    "ImbalanceEstimate",
    "ImbalanceEstimator",
    "IntegratorOptions",
    "RateEstimate",
    "RunStatus",
    "SimulatedEstimator",
    "TruthEstimator",
    "build_auxiliary_graph",
    "estimate_for_decision",
    "estimate_imbalance",
    "integrate_consensus",
    "make_estimator",
    "steady_rates",
]
