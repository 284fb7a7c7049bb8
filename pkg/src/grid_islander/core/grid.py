# src/grid_islander/core/grid.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from grid_islander.errors import (
    DisconnectedGridError,
    DuplicateEdgeError,
    GridFormatError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class NodeKind(Enum):
    GENERATOR = "generator"
    LOAD = "load"
    PASSIVE = "passive"

    @classmethod
    def from_power(cls, p: float) -> "NodeKind":
        if p > 0:
            return cls.GENERATOR
        if p < 0:
            return cls.LOAD
        return cls.PASSIVE


@dataclass(frozen=True)
class NodeRecord:
    """One bus: dense index, original bus number, active power injection in MW."""

    id: int
    bus: int
    p: float
    kind: NodeKind


def canonical_edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Grid:
    """
    Immutable undirected, simple, connected grid graph.

    Node ids are dense indices in [0, n); `NodeRecord.bus` keeps the original bus
    number for reporting. Edges are stored canonically (i < j) and sorted.
    Construction validates the invariants and raises on violations.
    """

    nodes: Tuple[NodeRecord, ...]
    edges: Tuple[Edge, ...]
    name: str = "grid"

    def __post_init__(self) -> None:
        for idx, node in enumerate(self.nodes):
            if node.id != idx:
                raise GridFormatError(
                    f"node ids must be dense, found id {node.id} at position {idx}",
                    field=f"nodes[{idx}].id",
                )
            if not math.isfinite(node.p):
                raise GridFormatError(
                    f"non-finite power at bus {node.bus}", field=f"nodes[{idx}].p"
                )
        if len({node.bus for node in self.nodes}) != len(self.nodes):
            raise GridFormatError("duplicate bus numbers", field="nodes")

        seen = set()
        n = len(self.nodes)
        for i, j in self.edges:
            if i == j:
                raise GridFormatError(f"self-loop at bus {self.nodes[i].bus}", field="edges")
            if not (0 <= i < n and 0 <= j < n):
                raise GridFormatError(f"edge ({i}, {j}) references unknown node", field="edges")
            e = canonical_edge(i, j)
            if e in seen:
                raise DuplicateEdgeError(
                    f"duplicate edge {self.nodes[e[0]].bus}-{self.nodes[e[1]].bus}"
                )
            seen.add(e)
        edges = tuple(sorted(canonical_edge(i, j) for i, j in self.edges))
        object.__setattr__(self, "edges", edges)

        if n == 0:
            raise GridFormatError("grid has no nodes", field="nodes")
        if n > 1 and not nx.is_connected(self.graph):
            parts = nx.number_connected_components(self.graph)
            raise DisconnectedGridError(f"grid {self.name!r} has {parts} connected components")

    # -----------------------------------------------------------------
    # sizes and powers
    # -----------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def n_g(self) -> int:
        return sum(1 for node in self.nodes if node.kind is NodeKind.GENERATOR)

    @cached_property
    def p(self) -> np.ndarray:
        arr = np.array([node.p for node in self.nodes], dtype=float)
        arr.setflags(write=False)
        return arr

    @property
    def p_total(self) -> float:
        return math.fsum(self.p)

    @property
    def p_bar(self) -> float:
        """Largest absolute nodal injection."""
        return float(np.abs(self.p).max())

    # -----------------------------------------------------------------
    # topology
    # -----------------------------------------------------------------
    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(nbrs)) for nbrs in adj)

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return nx.freeze(g)

    def neighbors(self, h: int) -> Tuple[int, ...]:
        """One-hop neighborhood of node h (the only topology a node can see)."""
        return self.adjacency[h]

    def degree(self, h: int) -> int:
        return len(self.adjacency[h])

    # -----------------------------------------------------------------
    # bus number mapping
    # -----------------------------------------------------------------
    @cached_property
    def index_of_bus(self) -> Dict[int, int]:
        return {node.bus: node.id for node in self.nodes}

    def bus(self, i: int) -> int:
        return self.nodes[i].bus

    def edge_from_buses(self, bus_a: int, bus_b: int) -> Edge:
        try:
            e = canonical_edge(self.index_of_bus[bus_a], self.index_of_bus[bus_b])
        except KeyError as exc:
            raise GridFormatError(f"unknown bus {exc.args[0]}", field="line") from None
        return e

    def without_line(self, bus_a: int, bus_b: int) -> "Grid":
        """Return the grid after tripping line bus_a-bus_b (contingency)."""
        e = self.edge_from_buses(bus_a, bus_b)
        if e not in set(self.edges):
            raise GridFormatError(f"line {bus_a}-{bus_b} not in grid", field="line")
        return Grid(
            nodes=self.nodes,
            edges=tuple(x for x in self.edges if x != e),
            name=f"{self.name}-{bus_a}-{bus_b}",
        )

    def sign_violations(self) -> List[str]:
        """Generators with p < 0 and loads with p > 0 (tolerated, reported)."""
        out = []
        for node in self.nodes:
            if node.kind is NodeKind.GENERATOR and node.p < 0:
                out.append(f"generator bus {node.bus} has p={node.p:g} MW < 0")
            elif node.kind is NodeKind.LOAD and node.p > 0:
                out.append(f"load bus {node.bus} has p={node.p:g} MW > 0")
        return out


def build_grid(
    powers: Mapping[int, float] | Sequence[Tuple[int, float]],
    lines: Iterable[Tuple[int, int]],
    *,
    name: str = "grid",
    kinds: Optional[Mapping[int, NodeKind]] = None,
) -> Grid:
    """
    Build a Grid from bus numbers. Buses keep the given order and are remapped to
    dense indices; `lines` are pairs of bus numbers.
    """
    items = list(powers.items()) if isinstance(powers, Mapping) else list(powers)
    kinds = kinds or {}
    nodes = tuple(
        NodeRecord(id=idx, bus=int(bus), p=float(p), kind=kinds.get(bus, NodeKind.from_power(p)))
        for idx, (bus, p) in enumerate(items)
    )
    index = {node.bus: node.id for node in nodes}
    edges = []
    for a, b in lines:
        if a not in index or b not in index:
            missing = a if a not in index else b
            raise GridFormatError(f"line {a}-{b} references unknown bus {missing}", field="edges")
        edges.append((index[a], index[b]))
    grid = Grid(nodes=nodes, edges=tuple(edges), name=name)
    for msg in grid.sign_violations():
        logger.warning("sign convention: %s", msg)
    return grid


# ---------------------------------------------------------------------
# Partition and derived values
# ---------------------------------------------------------------------
@dataclass(frozen=True)
class Partition:
    """Step-indexed assignment of each node to an island index in [0, n_mu)."""

    assignment: Tuple[int, ...]
    n_mu: int
    step: int = 0

    @cached_property
    def islands(self) -> Tuple[Tuple[int, ...], ...]:
        buckets: List[List[int]] = [[] for _ in range(self.n_mu)]
        for node, island in enumerate(self.assignment):
            buckets[island].append(node)
        return tuple(tuple(b) for b in buckets)

    def members(self, l: int) -> Tuple[int, ...]:
        return self.islands[l]

    def island_of(self, i: int) -> int:
        return self.assignment[i]

    def moved(self, i: int, to: int) -> "Partition":
        """Copy with node i reassigned to island `to` and the step advanced."""
        assignment = list(self.assignment)
        assignment[i] = to
        return Partition(assignment=tuple(assignment), n_mu=self.n_mu, step=self.step + 1)

    def to_buses(self, grid: Grid) -> Dict[str, List[int]]:
        return {str(l): [grid.bus(i) for i in members] for l, members in enumerate(self.islands)}


@dataclass(frozen=True)
class CondensedGraph:
    islands: Tuple[int, ...]
    links: Tuple[Edge, ...]


@dataclass(frozen=True)
class ImbalanceVector:
    """Island imbalances P_l in MW, indexed by island."""

    values: Tuple[float, ...]
    # P_tot of the grid when known; p_star divides it instead of re-summing values
    p_total: Optional[float] = None

    @property
    def n_mu(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        if self.p_total is not None:
            return self.p_total
        return math.fsum(self.values)

    @property
    def p_star(self) -> float:
        return self.total / self.n_mu

    @property
    def target(self) -> Tuple[float, ...]:
        """P* = p* times the all-ones vector."""
        return (self.p_star,) * self.n_mu

    def cost(self) -> float:
        return math.fsum(abs(v) for v in self.values) / self.n_mu

    def distance_to_target(self) -> float:
        return float(np.linalg.norm(np.asarray(self.values) - self.p_star))

    def transferred(self, to: int, frm: int, p_i: float) -> "ImbalanceVector":
        """Imbalances after a node with power p_i moves from island `frm` to `to`."""
        vals = list(self.values)
        vals[to] = vals[to] + p_i
        vals[frm] = vals[frm] - p_i
        return ImbalanceVector(tuple(vals), self.p_total)

    def __getitem__(self, l: int) -> float:
        return self.values[l]

