# tests/conftest.py
from __future__ import annotations

from typing import Callable, Optional

import numpy as np
import pytest

from grid_islander.core.grid import Grid, Partition, build_grid

SIX_NODE_POWERS = {1: 50.0, 2: 30.0, 3: 20.0, 4: -60.0, 5: -40.0, 6: 10.0}
SIX_NODE_LINES = [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (5, 6), (4, 6)]


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    # keep a developer's .env / shell settings out of the tests
    for var in (
        "GRID_ISLANDER_LOG",
        "GRID_ISLANDER_ESTIMATOR",
        "GRID_ISLANDER_INTEGRATOR",
        "GRID_ISLANDER_DB",
    ):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def six_node_grid() -> Grid:
    """Two triangles joined by line 3-4: P1 = 100 MW, P2 = -90 MW under the split below."""
    return build_grid(SIX_NODE_POWERS, SIX_NODE_LINES, name="six")


@pytest.fixture
def six_node_partition() -> Partition:
    return Partition(assignment=(0, 0, 0, 1, 1, 1), n_mu=2)


def random_grid(
    n: int,
    rng: np.random.Generator,
    extra_edges: Optional[int] = None,
    p_range: float = 600.0,
    zero_fraction: float = 0.0,
) -> Grid:
    """Random connected grid: a random tree plus a few chords, powers in [-p_range, p_range]."""
    lines = set()
    for k in range(1, n):
        parent = int(rng.integers(0, k))
        lines.add((parent + 1, k + 1))
    extra = n // 3 if extra_edges is None else extra_edges
    for _ in range(extra):
        a, b = (int(v) + 1 for v in rng.choice(n, size=2, replace=False))
        if (a, b) not in lines and (b, a) not in lines:
            lines.add((a, b))
    powers = np.round(rng.uniform(-p_range, p_range, size=n), 2)
    if zero_fraction:
        powers[rng.random(n) < zero_fraction] = 0.0
    return build_grid(
        {i + 1: float(v) for i, v in enumerate(powers)}, sorted(lines), name=f"random{n}"
    )


@pytest.fixture
def make_random_grid() -> Callable[..., Grid]:
    return random_grid
