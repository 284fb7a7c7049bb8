# src/grid_islander/core/__init__.py
from __future__ import annotations

from .grid import (
    CondensedGraph,
    Edge,
    Grid,
    ImbalanceVector,
    NodeKind,
    NodeRecord,
    Partition,
    build_grid,
)
from .io import load_grid, save_grid
from .topology import (
    articulation_vertices,
    boundary_nodes,
    condensed_graph,
    cost_J,
    cost_lower_bound,
    cut_set,
    cut_set_buses,
    is_connected_without,
    island_imbalance,
    island_imbalances,
    validate_partition,
)

__all__ = [
    "CondensedGraph",
    "Edge",
    "Grid",
    "ImbalanceVector",
    "NodeKind",
    "NodeRecord",
    "Partition",
    "articulation_vertices",
    "boundary_nodes",
    "build_grid",
    "condensed_graph",
    "cost_J",
    "cost_lower_bound",
    "cut_set",
    "cut_set_buses",
    "is_connected_without",
    "island_imbalance",
    "island_imbalances",
    "load_grid",
    "save_grid",
    "validate_partition",
]
