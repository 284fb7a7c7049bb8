# src/grid_islander/config.py
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

DEFAULT_DB_PATH = Path.home() / ".grid_islander" / "runs.db"

ESTIMATOR_MODES = ("simulate", "oracle", "exact")
INTEGRATORS = ("euler", "rk4")


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared by the estimator, the scheduler and the certificates."""

    # relative spread of consensus rates at steady state
    steady: float = 1e-9
    # absolute MW gap between component rates that signals a split island
    disagreement: float = 1e-6
    # relative |omega_hat - omega| below which the estimate is singular
    singular: float = 1e-8
    # absolute MW tolerance for every imbalance comparison
    mw: float = 1e-6
    # relative drift allowed between bookkeeping and recomputed imbalances
    drift: float = 1e-9


@dataclass(frozen=True)
class Settings:
    log_level: str = "WARNING"
    estimator: str = "simulate"
    integrator: str = "euler"
    db_path: Path = DEFAULT_DB_PATH

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        estimator = os.getenv("GRID_ISLANDER_ESTIMATOR", "simulate").lower()
        integrator = os.getenv("GRID_ISLANDER_INTEGRATOR", "euler").lower()
        if estimator not in ESTIMATOR_MODES:
            estimator = "simulate"
        if integrator not in INTEGRATORS:
            integrator = "euler"
        db = os.getenv("GRID_ISLANDER_DB")
        return cls(
            log_level=os.getenv("GRID_ISLANDER_LOG", "WARNING").upper(),
            estimator=estimator,
            integrator=integrator,
            db_path=Path(db) if db else DEFAULT_DB_PATH,
        )


def configure_logging(level: str) -> None:
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(
        level=numeric,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
