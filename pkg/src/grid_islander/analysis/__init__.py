# src/grid_islander/analysis/__init__.py
from __future__ import annotations

from .bounds import (
    BoundReport,
    ContractionStep,
    bound_from_values,
    contraction_holds,
    contraction_trace,
    imbalance_stddev,
    infer_p_bar,
    l_star,
    lemma1_bound,
    neighbor_gap_certificate,
)
from .diagnostics import attach_diagnostics
from .oracle import DEFAULT_CAP, OracleResult, brute_force_optimum, restricted_growth_strings

__all__ = [
    "BoundReport",
    "ContractionStep",
    "DEFAULT_CAP",
    "OracleResult",
    "attach_diagnostics",
    "bound_from_values",
    "brute_force_optimum",
    "contraction_holds",
    "contraction_trace",
    "imbalance_stddev",
    "infer_p_bar",
    "l_star",
    "lemma1_bound",
    "neighbor_gap_certificate",
    "restricted_growth_strings",
]
