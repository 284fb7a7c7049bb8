# src/grid_islander/analysis/oracle.py
"""Exhaustive search for the minimum-cost partition of small grids."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from grid_islander.core.grid import Grid, Partition
from grid_islander.errors import OracleCapExceededError, PartitionError

logger = logging.getLogger(__name__)

DEFAULT_CAP = 14


@dataclass(frozen=True)
class OracleResult:
    optimal_J: float
    optimal_partitions: Tuple[Partition, ...]
    # label-canonical assignments visited, connected or not
    enumerated_count: int


def restricted_growth_strings(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """
    Every assignment of n nodes to exactly k unlabeled blocks, once each: node 0 is
    in block 0 and each node opens at most one new block past the largest seen.
    """
    if k < 1 or k > n:
        return
    a = [0] * n

    def rec(pos: int, top: int) -> Iterator[Tuple[int, ...]]:
        if pos == n:
            if top + 1 == k:
                yield tuple(a)
            return
        for v in range(min(top + 2, k)):
            opened = max(top, v)
            # the nodes left must still be able to open the missing blocks
            if k - (opened + 1) > n - pos - 1:
                continue
            a[pos] = v
            yield from rec(pos + 1, opened)

    yield from rec(1, 0)


def _islands_connected(
    adjacency: Sequence[Tuple[int, ...]], assignment: Tuple[int, ...], k: int
) -> bool:
    # runs once per enumerated assignment; a plain DFS on the cached adjacency
    # avoids building a networkx subgraph view per island
    seen = [False] * len(assignment)
    for island in range(k):
        start = assignment.index(island)
        stack = [start]
        seen[start] = True
        reached = 1
        while stack:
            h = stack.pop()
            for j in adjacency[h]:
                if not seen[j] and assignment[j] == island:
                    seen[j] = True
                    reached += 1
                    stack.append(j)
        if reached != assignment.count(island):
            return False
    return True


def brute_force_optimum(
    grid: Grid, n_mu: int, cap: int = DEFAULT_CAP, tol: float = 1e-6
) -> OracleResult:
    """Minimum average absolute imbalance over all connected partitions into n_mu islands."""
    if grid.n > cap:
        raise OracleCapExceededError(
            f"oracle enumerates at most {cap} nodes, grid {grid.name!r} has {grid.n}"
        )
    if not 1 <= n_mu <= grid.n:
        raise PartitionError(f"cannot split {grid.n} nodes into {n_mu} islands")

    p = grid.p
    adjacency = grid.adjacency
    best = float("inf")
    found: List[Tuple[float, Tuple[int, ...]]] = []
    count = 0
    for assignment in restricted_growth_strings(grid.n, n_mu):
        count += 1
        sums = np.bincount(np.asarray(assignment), weights=p, minlength=n_mu)
        J = float(np.abs(sums).sum()) / n_mu
        if J > best + tol:
            continue
        if not _islands_connected(adjacency, assignment, n_mu):
            continue
        best = min(best, J)
        found.append((J, assignment))

    logger.debug("oracle visited %d assignments of %s into %d islands", count, grid.name, n_mu)
    kept = [a for J, a in found if J <= best + tol]
    return OracleResult(
        optimal_J=best,
        optimal_partitions=tuple(Partition(assignment=a, n_mu=n_mu) for a in sorted(kept)),
        enumerated_count=count,
    )
