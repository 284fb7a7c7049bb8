# src/grid_islander/estimator/consensus.py
from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Tuple

import numpy as np
from scipy import linalg

from grid_islander.core.grid import Grid, Partition, canonical_edge
from grid_islander.core.topology import components
from grid_islander.errors import (
    EstimatorInconsistencyError,
    IntegratorDivergenceError,
    IterationCapError,
    NonSteadyRunError,
    ProbeError,
)

from .base import (
    SINGULAR_ESTIMATE,
    AuxiliaryGraph,
    Condition,
    ConsensusRun,
    ImbalanceEstimate,
    IntegratorOptions,
    RateEstimate,
    RunStatus,
)

logger = logging.getLogger(__name__)

# |xdot| can never exceed max|p| for a stable step; far beyond it means blow-up
_DIVERGENCE_FACTOR = 1e3


def build_auxiliary_graph(grid: Grid, part: Partition, l: int, i: int) -> AuxiliaryGraph:
    members = part.members(l)
    member = part.island_of(i) == l
    if member:
        vertices = tuple(h for h in members if h != i)
    else:
        in_island = set(members)
        if not any(j in in_island for j in grid.neighbors(i)):
            raise ProbeError(f"bus {grid.bus(i)} is neither in nor adjacent to island {l}")
        vertices = tuple(sorted(members + (i,)))
    vset = set(vertices)
    edges = tuple(
        sorted({canonical_edge(h, j) for h in vertices for j in grid.neighbors(h) if j in vset})
    )
    return AuxiliaryGraph(island=l, probe=i, member=member, vertices=vertices, edges=edges)


def _laplacian(grid: Grid, vertices: Tuple[int, ...]) -> np.ndarray:
    """Laplacian of the induced subgraph, built from each vertex's one-hop view."""
    index = {h: k for k, h in enumerate(vertices)}
    L = np.zeros((len(vertices), len(vertices)))
    for k, h in enumerate(vertices):
        for j in grid.neighbors(h):
            if j in index:
                L[k, index[j]] = -1.0
                L[k, k] += 1.0
    return L


def _step_operators(L: np.ndarray, dt: float, method: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    One integration step as x <- A x + B p. Both A and B are polynomials in L,
    so xdot <- A xdot as well.
    """
    eye = np.eye(L.shape[0])
    M = dt * L
    if method == "euler":
        return eye - M, dt * eye
    if method == "rk4":
        M2 = M @ M
        M3 = M2 @ M
        A = eye - M + M2 / 2.0 - M3 / 6.0 + (M3 @ M) / 24.0
        B = dt * (eye - M / 2.0 + M2 / 6.0 - M3 / 24.0)
        return A, B
    raise ValueError(f"unknown integration method {method!r}")


def _fiedler(L: np.ndarray) -> float:
    if L.shape[0] < 2:
        return 0.0
    eig = linalg.eigvalsh(L)
    return float(max(eig[1], 0.0))


def integrate_consensus(
    grid: Grid, vertices: Iterable[int], opts: IntegratorOptions | None = None
) -> ConsensusRun:
    """
    Integrate xdot = p - L x over the vertex set from x = 0 until the rates of every
    connected component are steady.

    The step propagator is squared between checks, so the k-th check sits at
    2**k steps; values there are those of plain step-by-step integration.
    """
    opts = opts or IntegratorOptions()
    verts = tuple(sorted(set(vertices)))
    if not verts:
        raise ProbeError("consensus needs a nonempty vertex set")

    L = _laplacian(grid, verts)
    p = grid.p[list(verts)].astype(float)
    d_max = float(np.diag(L).max())
    dt = opts.dt if opts.dt is not None else 1.0 / (d_max + 1.0)
    A, B = _step_operators(L, dt, opts.method)

    index = {h: k for k, h in enumerate(verts)}
    comps = [np.array([index[h] for h in c]) for c in components(grid, verts)]
    total = float(p.sum())
    drift_limit = opts.drift_tol * (1.0 + float(np.abs(p).sum()))
    blow_up = _DIVERGENCE_FACTOR * (1.0 + float(np.abs(p).max()))

    x = np.zeros_like(p)
    xdot = p.copy()
    trace: List[Tuple[float, int, float, float]] = []
    propagator, partial_sum, block = A, np.eye(len(verts)), 1
    steps = 0

    while True:
        if opts.trace:
            t = steps * dt
            trace.extend((t, grid.bus(h), float(x[k]), float(xdot[k])) for k, h in enumerate(verts))

        rates = tuple(float(xdot[c].mean()) for c in comps)
        steady = all(
            float(np.abs(xdot[c] - r).max()) <= opts.steady_tol * (1.0 + abs(r))
            for c, r in zip(comps, rates)
        )
        if steady:
            break
        if steps >= opts.max_steps:
            raise IterationCapError(
                f"consensus over {len(verts)} nodes not steady after {steps} steps"
            )

        x = x + partial_sum @ (B @ xdot)
        xdot = propagator @ xdot
        steps += block

        if not np.all(np.isfinite(xdot)) or float(np.abs(xdot).max()) > blow_up:
            raise IntegratorDivergenceError(
                f"consensus diverged after {steps} steps with dt={dt:g}; reduce the step size"
            )
        drift = abs(float(xdot.sum()) - total)
        if drift > drift_limit:
            raise IntegratorDivergenceError(
                f"rate sum drifted by {drift:.3e} MW (limit {drift_limit:.3e})"
            )

        partial_sum = partial_sum + propagator @ partial_sum
        propagator = propagator @ propagator
        block *= 2

    spread = max(rates) - min(rates)
    status = RunStatus.DISAGREEMENT if spread > opts.disagreement_tol else RunStatus.STEADY
    fiedler = _fiedler(L)
    t_final = steps * dt
    if fiedler > 0.0:
        logger.debug(
            "consensus n=%d steady at t=%.3f (%d steps), lambda2=%.4g, C=t*lambda2=%.3f",
            len(verts),
            t_final,
            steps,
            fiedler,
            t_final * fiedler,
        )
    return ConsensusRun(
        vertices=verts,
        x=x,
        xdot=xdot,
        t=t_final,
        dt=dt,
        steps=steps,
        status=status,
        component_rates=rates,
        fiedler=fiedler,
        trace=trace,
    )


def steady_rates(
    run_island: ConsensusRun, run_aux: ConsensusRun, probe: int, member: bool
) -> RateEstimate:
    for run in (run_island, run_aux):
        if run.status is not RunStatus.STEADY:
            raise NonSteadyRunError(
                f"consensus over {run.size} nodes is {run.status.value}, not steady"
            )
    return RateEstimate(omega=run_island.rate, omega_hat=run_aux.rate, a_l=-1 if member else 1)


def estimate_imbalance(
    rates: RateEstimate, p_i: float, singular_tol: float = 1e-8
) -> ImbalanceEstimate:
    """Recover island imbalance and size from the two consensus rates."""
    omega, omega_hat = rates.omega, rates.omega_hat
    gap = omega_hat - omega
    if abs(gap) <= singular_tol * (1.0 + abs(omega)):
        return SINGULAR_ESTIMATE
    size_hat = rates.a_l * (p_i - omega_hat) / gap
    P_hat = omega * size_hat
    size_rounded = int(round(size_hat))
    if size_rounded < 1 or abs(size_hat - size_rounded) > 0.5:
        raise EstimatorInconsistencyError(
            f"estimated island size {size_hat:.6g} is not a positive integer "
            f"(omega={omega:.9g}, omega_hat={omega_hat:.9g}, p_i={p_i:.9g})"
        )
    return ImbalanceEstimate(
        P_hat=P_hat, size_hat=size_hat, size_rounded=size_rounded, condition=Condition.WELL_POSED
    )


def write_trace(run: ConsensusRun, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "node", "x", "xdot"])
        for t, node, x, xdot in run.trace:
            writer.writerow([repr(t), node, repr(x), repr(xdot)])

