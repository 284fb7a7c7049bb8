# src/grid_islander/initpart/__init__.py
from __future__ import annotations

from .seeding import (
    GeneratorGroups,
    from_cut_set,
    load_cut_set_partition,
    load_partition,
    random_partition,
    read_groups,
    sspr_bfs,
)

__all__ = [
    "GeneratorGroups",
    "from_cut_set",
    "load_cut_set_partition",
    "load_partition",
    "random_partition",
    "read_groups",
    "sspr_bfs",
]
