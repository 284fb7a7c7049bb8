# src/grid_islander/persistence/__init__.py
from .store import RunRecord, RunStore

__all__ = ["RunRecord", "RunStore"]
