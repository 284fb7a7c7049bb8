# src/grid_islander/persistence/db.py
from __future__ import annotations

import sqlite3
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from grid_islander.config import DEFAULT_DB_PATH


def ensure_db_path(path: Optional[str | Path]) -> Path:
    p = Path(path) if path else DEFAULT_DB_PATH
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


@contextmanager
def connect(path: Optional[str | Path] = None) -> Iterator[sqlite3.Connection]:
    """Yield a sqlite3.Connection with row access by name; commits on exit."""
    conn = sqlite3.connect(str(ensure_db_path(path)), timeout=30)
    conn.row_factory = sqlite3.Row
    try:
        yield conn
    finally:
        conn.commit()
        conn.close()


def initialize_db(path: Optional[str | Path] = None) -> None:
    """Create the runs table if it doesn't exist."""
    ddl = """
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        created_at TEXT NOT NULL,
        grid_name TEXT NOT NULL,
        n_mu INTEGER NOT NULL,
        estimator TEXT,
        steps INTEGER NOT NULL,
        j_initial REAL NOT NULL,
        j_final REAL NOT NULL,
        j_star REAL NOT NULL,
        bound REAL,
        termination TEXT NOT NULL,
        report TEXT
    );
    CREATE INDEX IF NOT EXISTS idx_runs_created_at ON runs(created_at);
    CREATE INDEX IF NOT EXISTS idx_runs_grid_name ON runs(grid_name);
    """
    with connect(path) as conn:
        conn.executescript(ddl)
