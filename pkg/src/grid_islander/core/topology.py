# src/grid_islander/core/topology.py
"""Exact partition computations: imbalances, cost, boundary, connectivity, cut-sets."""
from __future__ import annotations

import math
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

import networkx as nx

from grid_islander.errors import CoverageError, DisconnectedIslandError, EmptyIslandError

from .grid import CondensedGraph, Edge, Grid, ImbalanceVector, Partition, canonical_edge


# ---------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------
def validate_partition(grid: Grid, part: Partition) -> None:
    """Raise a PartitionError unless `part` covers the grid with connected islands."""
    if len(part.assignment) != grid.n:
        raise CoverageError(
            f"partition assigns {len(part.assignment)} nodes, grid has {grid.n}"
        )
    if part.n_mu < 1:
        raise EmptyIslandError("partition must have at least one island")
    for i, island in enumerate(part.assignment):
        if not 0 <= island < part.n_mu:
            raise CoverageError(f"bus {grid.bus(i)} assigned to unknown island {island}")
    for l, members in enumerate(part.islands):
        if not members:
            raise EmptyIslandError(f"island {l} is empty")
        if not nx.is_connected(grid.graph.subgraph(members)):
            raise DisconnectedIslandError(f"island {l} is not connected")


# ---------------------------------------------------------------------
# Imbalances and cost
# ---------------------------------------------------------------------
def island_imbalance(grid: Grid, part: Partition, l: int) -> float:
    return math.fsum(grid.p[list(part.members(l))])


def island_imbalances(grid: Grid, part: Partition) -> ImbalanceVector:
    groups: List[List[float]] = [[] for _ in range(part.n_mu)]
    for island, p in zip(part.assignment, grid.p):
        groups[island].append(float(p))
    return ImbalanceVector(tuple(math.fsum(g) for g in groups), grid.p_total)


def cost_J(grid: Grid, part: Partition) -> float:
    """Average absolute island imbalance."""
    return island_imbalances(grid, part).cost()


def cost_lower_bound(grid: Grid, n_mu: int) -> float:
    """J* = |P_tot / n_mu|, the floor of the cost over every partition."""
    return abs(grid.p_total / n_mu)


# ---------------------------------------------------------------------
# Boundary and cut-set
# ---------------------------------------------------------------------
def boundary_nodes(grid: Grid, part: Partition) -> Dict[int, Tuple[int, ...]]:
    """Map each boundary node to the sorted foreign islands it touches."""
    touched: Dict[int, Set[int]] = {}
    a = part.assignment
    for i, j in grid.edges:
        if a[i] != a[j]:
            touched.setdefault(i, set()).add(a[j])
            touched.setdefault(j, set()).add(a[i])
    return {i: tuple(sorted(touched[i])) for i in sorted(touched)}


def cut_set(grid: Grid, part: Partition) -> List[Edge]:
    a = part.assignment
    return [e for e in grid.edges if a[e[0]] != a[e[1]]]


def cut_set_buses(grid: Grid, part: Partition) -> List[Tuple[int, int]]:
    """Cut-set with original bus numbers, each pair ordered and the list sorted."""
    pairs = []
    for i, j in cut_set(grid, part):
        a, b = grid.bus(i), grid.bus(j)
        pairs.append((a, b) if a < b else (b, a))
    return sorted(pairs)


def condensed_graph(grid: Grid, part: Partition) -> CondensedGraph:
    a = part.assignment
    links = {canonical_edge(a[i], a[j]) for i, j in grid.edges if a[i] != a[j]}
    return CondensedGraph(islands=tuple(range(part.n_mu)), links=tuple(sorted(links)))


# ---------------------------------------------------------------------
# Connectivity
# ---------------------------------------------------------------------
def is_connected_without(grid: Grid, part: Partition, l: int, i: int) -> bool:
    """True iff island l stays connected once node i leaves it (empty counts as connected)."""
    rest = [h for h in part.members(l) if h != i]
    if not rest:
        return True
    return bool(nx.is_connected(grid.graph.subgraph(rest)))


def articulation_vertices(grid: Grid, part: Partition, l: int) -> FrozenSet[int]:
    """Nodes whose removal disconnects island l (lowpoint DFS, linear time)."""
    return frozenset(nx.articulation_points(grid.graph.subgraph(part.members(l))))


def components(grid: Grid, vertices: Iterable[int]) -> List[Tuple[int, ...]]:
    """Connected components of the induced subgraph, each sorted, ordered by first node."""
    comps = [tuple(sorted(c)) for c in nx.connected_components(grid.graph.subgraph(vertices))]
    return sorted(comps)
