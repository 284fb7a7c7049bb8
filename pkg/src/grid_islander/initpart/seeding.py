# src/grid_islander/initpart/seeding.py
"""Initial partitions: generator-group seeding, random seeding, files and cut-sets."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from grid_islander.core.grid import Grid, Partition
from grid_islander.core.io import read_cut_set, read_partition
from grid_islander.core.topology import validate_partition
from grid_islander.errors import GridFormatError, OverlappingGroupsError, PartitionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorGroups:
    """Coherent generator groups, one per target island (dense node ids)."""

    groups: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        seen: Set[int] = set()
        for idx, group in enumerate(self.groups):
            if not group:
                raise PartitionError(f"generator group {idx} is empty")
            clash = seen & group
            if clash:
                raise OverlappingGroupsError(
                    f"node(s) {sorted(clash)} appear in more than one generator group"
                )
            seen |= group

    @property
    def n_mu(self) -> int:
        return len(self.groups)

    @classmethod
    def from_buses(cls, grid: Grid, groups: Iterable[Iterable[int]]) -> "GeneratorGroups":
        out = []
        for idx, buses in enumerate(groups):
            members = set()
            for bus in buses:
                if bus not in grid.index_of_bus:
                    raise GridFormatError(f"unknown bus {bus}", field=f"groups[{idx}]")
                members.add(grid.index_of_bus[bus])
            out.append(frozenset(members))
        return cls(tuple(out))

    @classmethod
    def from_dict(cls, grid: Grid, doc: Mapping[str, Any]) -> "GeneratorGroups":
        """Decode {"0": [bus, ...], "1": [...]} ordered by integer key."""
        try:
            keys = sorted(doc, key=int)
        except (TypeError, ValueError):
            raise GridFormatError("group keys must be integers", field="groups") from None
        return cls.from_buses(grid, (doc[k] for k in keys))


def read_groups(path: str | Path, grid: Grid) -> GeneratorGroups:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    except OSError as exc:
        raise GridFormatError(f"cannot read {path}: {exc.strerror}") from None
    if not isinstance(doc, Mapping):
        raise GridFormatError("generator groups must be a JSON object", field="groups")
    return GeneratorGroups.from_dict(grid, doc)


# ---------------------------------------------------------------------
# Growth
# ---------------------------------------------------------------------
def _grow(grid: Grid, seeds: Sequence[Set[int]]) -> Partition:
    """
    Attach every unassigned node by breadth-first layers, expanding the islands in
    round-robin order one layer at a time. Lower node ids win within a layer.
    """
    assignment = [-1] * grid.n
    frontiers: List[List[int]] = []
    for l, seed in enumerate(seeds):
        for h in seed:
            assignment[h] = l
        frontiers.append(sorted(seed))

    remaining = grid.n - sum(len(s) for s in seeds)
    while remaining > 0:
        grew = False
        for l in range(len(seeds)):
            layer = []
            for h in frontiers[l]:
                for j in grid.neighbors(h):
                    if assignment[j] == -1:
                        assignment[j] = l
                        layer.append(j)
            frontiers[l] = sorted(layer)
            remaining -= len(layer)
            grew = grew or bool(layer)
        if not grew:
            raise PartitionError("seed growth stalled; the grid is not connected")
    part = Partition(assignment=tuple(assignment), n_mu=len(seeds))
    validate_partition(grid, part)
    return part


def sspr_bfs(grid: Grid, groups: GeneratorGroups) -> Partition:
    """
    Seed one island per coherent generator group: connect each group through the
    union of hop-shortest paths from its lowest node, then grow the trees.
    """
    if groups.n_mu < 2:
        raise PartitionError(f"need at least two generator groups, got {groups.n_mu}")
    trees: List[Set[int]] = []
    for group in groups.groups:
        members = sorted(group)
        root = members[0]
        tree = {root}
        for target in members[1:]:
            tree.update(nx.shortest_path(grid.graph, root, target))
        trees.append(tree)

    for a in range(len(trees)):
        for b in range(a + 1, len(trees)):
            shared = trees[a] & trees[b]
            if shared:
                buses = sorted(grid.bus(h) for h in shared)
                raise OverlappingGroupsError(
                    f"trees of generator groups {a} and {b} share buses {buses[:10]}; "
                    "try different groups"
                )
    part = _grow(grid, trees)
    logger.info("seeded %d islands from generator groups on %s", part.n_mu, grid.name)
    return part


def random_partition(grid: Grid, n_mu: int, seed: int) -> Partition:
    """Valid partition grown from n_mu distinct random roots; deterministic per seed."""
    if not 1 <= n_mu <= grid.n:
        raise PartitionError(f"cannot split {grid.n} nodes into {n_mu} islands")
    rng = np.random.default_rng(seed)
    roots = rng.choice(grid.n, size=n_mu, replace=False)
    return _grow(grid, [{int(r)} for r in roots])


# ---------------------------------------------------------------------
# From files
# ---------------------------------------------------------------------
def from_cut_set(
    grid: Grid, pairs: Sequence[Tuple[int, int]], n_mu: Optional[int] = None
) -> Partition:
    """
    Rebuild the partition a cut-set determines: drop the cut lines and take the
    connected components, labeled by their lowest node id.
    """
    edges = set(grid.edges)
    cut = set()
    for a, b in pairs:
        e = grid.edge_from_buses(a, b)
        if e not in edges:
            raise GridFormatError(f"cut line {a}-{b} is not a grid line", field="cut-set")
        cut.add(e)

    g = nx.Graph()
    g.add_nodes_from(range(grid.n))
    g.add_edges_from(e for e in grid.edges if e not in cut)
    comps = sorted(tuple(sorted(c)) for c in nx.connected_components(g))
    assignment = [0] * grid.n
    for l, comp in enumerate(comps):
        for h in comp:
            assignment[h] = l

    for i, j in sorted(cut):
        if assignment[i] == assignment[j]:
            raise PartitionError(
                f"cut line {grid.bus(i)}-{grid.bus(j)} lies inside one island"
            )
    if n_mu is not None and len(comps) != n_mu:
        raise PartitionError(f"cut-set yields {len(comps)} islands, expected {n_mu}")
    part = Partition(assignment=tuple(assignment), n_mu=len(comps))
    validate_partition(grid, part)
    return part


def load_partition(path: str | Path, grid: Grid) -> Partition:
    part = read_partition(path, grid)
    validate_partition(grid, part)
    return part


def load_cut_set_partition(
    path: str | Path, grid: Grid, n_mu: Optional[int] = None
) -> Partition:
    return from_cut_set(grid, read_cut_set(path), n_mu)
