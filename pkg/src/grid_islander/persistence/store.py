# src/grid_islander/persistence/store.py
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .db import connect, initialize_db

logger = logging.getLogger(__name__)

_COLUMNS = (
    "id, created_at, grid_name, n_mu, estimator, steps, "
    "j_initial, j_final, j_star, bound, termination, report"
)


@dataclass
class RunRecord:
    """One ledger row: the summary of a migration run plus its full JSON report."""

    id: int
    created_at: str
    grid_name: str
    n_mu: int
    estimator: Optional[str]
    steps: int
    j_initial: float
    j_final: float
    j_star: float
    bound: Optional[float]
    termination: str
    report: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class RunStore:
    """SQLite DAO for the run ledger."""

    def __init__(self, db_path: Optional[str | Path] = None) -> None:
        self.db_path = db_path
        initialize_db(self.db_path)

    def save_run(self, report: Mapping[str, Any]) -> int:
        """Insert a serialized run report (see `reporting.report_to_dict`); returns the row id."""
        summary = report["summary"]
        created_at = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
        bound = report.get("diagnostics", {}).get("bound", {}).get("bound")
        with connect(self.db_path) as conn:
            cur = conn.execute(
                """
                INSERT INTO runs
                (created_at, grid_name, n_mu, estimator, steps,
                 j_initial, j_final, j_star, bound, termination, report)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    created_at,
                    report["grid"],
                    int(report["n_mu"]),
                    report.get("diagnostics", {}).get("estimator", {}).get("name"),
                    int(summary["K"]),
                    float(summary["J_initial"]),
                    float(summary["J_final"]),
                    float(summary["J_star"]),
                    bound,
                    summary["termination"],
                    json.dumps(report, sort_keys=True),
                ),
            )
            row_id = int(cur.lastrowid or 0)
        logger.info("recorded run %d for grid %s", row_id, report["grid"])
        return row_id

    def fetch_recent(self, limit: int = 20, grid_name: Optional[str] = None) -> List[RunRecord]:
        query = f"SELECT {_COLUMNS} FROM runs"
        params: tuple = ()
        if grid_name is not None:
            query += " WHERE grid_name = ?"
            params = (grid_name,)
        query += " ORDER BY created_at DESC, id DESC LIMIT ?"
        with connect(self.db_path) as conn:
            rows = conn.execute(query, params + (limit,)).fetchall()
            return [self._row_to_record(r) for r in rows]

    def fetch_by_id(self, row_id: int) -> Optional[RunRecord]:
        with connect(self.db_path) as conn:
            row = conn.execute(f"SELECT {_COLUMNS} FROM runs WHERE id = ?", (row_id,)).fetchone()
            return self._row_to_record(row) if row else None

    def export_json(self, limit: int = 20) -> str:
        """Return a JSON string of recent runs."""
        recs = self.fetch_recent(limit)
        return json.dumps([r.to_dict() for r in recs], indent=2)

    def _row_to_record(self, row: Mapping[str, Any]) -> RunRecord:
        try:
            report = json.loads(row["report"]) if row["report"] else {}
        except json.JSONDecodeError:
            logger.warning("run %s has an unreadable report column", row["id"])
            report = {}
        return RunRecord(
            id=row["id"],
            created_at=row["created_at"],
            grid_name=row["grid_name"],
            n_mu=row["n_mu"],
            estimator=row["estimator"],
            steps=row["steps"],
            j_initial=row["j_initial"],
            j_final=row["j_final"],
            j_star=row["j_star"],
            bound=row["bound"],
            termination=row["termination"],
            report=report,
        )
