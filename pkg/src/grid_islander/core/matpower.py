# src/grid_islander/core/matpower.py
"""
Reader for the subset of a MATPOWER `.m` case needed for islanding:
bus numbers and demand, in-service generator dispatch, in-service branch topology.
"""
from __future__ import annotations

import logging
import re
from collections import defaultdict
from typing import Dict, List, Set, Tuple

import numpy as np

from grid_islander.errors import GridFormatError

from .grid import Grid, NodeKind, build_grid, canonical_edge

logger = logging.getLogger(__name__)

# 0-based MATPOWER column indices
BUS_I, PD = 0, 2
GEN_BUS, PG, GEN_STATUS, PMAX = 0, 1, 7, 8
F_BUS, T_BUS, BR_STATUS = 0, 1, 10

_MIN_COLS = {"bus": PD + 1, "gen": PMAX + 1, "branch": BR_STATUS + 1}

_START_RE = re.compile(r"^\s*mpc\.(\w+)\s*=\s*\[(.*)$")


def _parse_row(text: str, lineno: int, matrix: str) -> List[float]:
    tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        return [float(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not _is_number(t))
        raise GridFormatError(f"non-numeric entry {bad!r}", line=lineno, field=matrix) from None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_matrices(text: str) -> Dict[str, Tuple[np.ndarray, List[int]]]:
    """
    Extract every `mpc.<name> = [ ... ];` matrix as a float array, with the source
    line of each row. Comments (`%`) are stripped. Only numeric matrices are kept.
    """
    out: Dict[str, Tuple[np.ndarray, List[int]]] = {}
    current = None
    rows: List[List[float]] = []
    row_lines: List[int] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0]
        if current is None:
            m = _START_RE.match(line)
            if not m:
                continue
            current, line = m.group(1), m.group(2)
            rows, row_lines = [], []
            if current not in _MIN_COLS:
                # matrices we do not read (gencost, areas, ...) may hold strings
                if "]" in line:
                    current = None
                else:
                    current = "_skip_" + current
                continue
        elif current.startswith("_skip_"):
            if "]" in line:
                current = None
            continue

        closing = "]" in line
        body = line.split("]", 1)[0]
        for chunk in body.split(";"):
            if chunk.strip():
                values = _parse_row(chunk, lineno, current)
                if len(values) < _MIN_COLS[current]:
                    raise GridFormatError(
                        f"row has {len(values)} columns, need {_MIN_COLS[current]}",
                        line=lineno,
                        field=current,
                    )
                rows.append(values)
                row_lines.append(lineno)
        if closing:
            if not rows:
                raise GridFormatError(f"matrix mpc.{current} is empty", line=lineno, field=current)
            width = min(len(r) for r in rows)
            matrix = np.array([r[:width] for r in rows], dtype=float).reshape(len(rows), width)
            out[current] = (matrix, row_lines)
            current = None

    if current is not None and not current.startswith("_skip_"):
        raise GridFormatError(f"matrix mpc.{current} is not closed", field=current)
    return out


def parse_matpower(text: str, *, name: str = "case", exclude_compensators: bool = False) -> Grid:
    """
    Build a Grid: p_i = (sum of in-service generator Pg at bus i) - Pd_i.

    Parallel branches collapse to one edge; out-of-service branches are dropped.
    With `exclude_compensators`, generators with PMAX <= 0 do not make a bus a
    generator (their Pg still counts).
    """
    mats = read_matrices(text)
    for required in ("bus", "gen", "branch"):
        if required not in mats:
            raise GridFormatError(f"case has no mpc.{required} matrix", field=required)

    bus, _ = mats["bus"]
    gen, gen_lines = mats["gen"]
    branch, branch_lines = mats["branch"]

    buses = [int(b) for b in bus[:, BUS_I]]
    power: Dict[int, float] = {b: -float(pd) for b, pd in zip(buses, bus[:, PD])}
    gen_buses: Set[int] = set()
    dispatch: Dict[int, float] = defaultdict(float)

    for row, lineno in zip(gen, gen_lines):
        b = int(row[GEN_BUS])
        if b not in power:
            raise GridFormatError(f"generator at unknown bus {b}", line=lineno, field="gen")
        if row[GEN_STATUS] <= 0:
            continue
        dispatch[b] += float(row[PG])
        if exclude_compensators and row[PMAX] <= 0:
            continue
        gen_buses.add(b)

    for b, pg in dispatch.items():
        power[b] += pg

    lines: List[Tuple[int, int]] = []
    seen: Set[Tuple[int, int]] = set()
    dropped = collapsed = 0
    for row, lineno in zip(branch, branch_lines):
        f, t = int(row[F_BUS]), int(row[T_BUS])
        if f not in power or t not in power:
            raise GridFormatError(f"branch {f}-{t} at unknown bus", line=lineno, field="branch")
        if row[BR_STATUS] <= 0:
            dropped += 1
            continue
        if f == t:
            continue
        e = canonical_edge(f, t)
        if e in seen:
            collapsed += 1
            continue
        seen.add(e)
        lines.append((f, t))

    logger.info(
        "matpower %s: %d buses, %d branches (%d out of service, %d parallel collapsed)",
        name,
        len(buses),
        len(branch),
        dropped,
        collapsed,
    )

    kinds = {
        b: NodeKind.GENERATOR
        if b in gen_buses
        else (NodeKind.LOAD if power[b] != 0 else NodeKind.PASSIVE)
        for b in buses
    }
    return build_grid([(b, power[b]) for b in buses], lines, name=name, kinds=kinds)
