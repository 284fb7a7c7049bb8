# src/grid_islander/core/io.py
from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from grid_islander.errors import CoverageError, GridFormatError

from .grid import Grid, NodeKind, Partition, build_grid

logger = logging.getLogger(__name__)

GRID_FORMATS = ("native", "matpower")

_CUT_LINE_RE = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")


# ---------------------------------------------------------------------
# Native grid format: {"name", "nodes": [{"id", "kind", "p"}], "edges": [[a, b]]}
# ---------------------------------------------------------------------
def grid_to_dict(grid: Grid) -> Dict[str, Any]:
    return {
        "name": grid.name,
        "nodes": [{"id": node.bus, "kind": node.kind.value, "p": node.p} for node in grid.nodes],
        "edges": [[grid.bus(i), grid.bus(j)] for i, j in grid.edges],
    }


def grid_from_dict(doc: Mapping[str, Any], *, name: str = "grid") -> Grid:
    if not isinstance(doc, Mapping):
        raise GridFormatError("grid document must be a JSON object")
    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_nodes, list):
        raise GridFormatError("missing node list", field="nodes")
    if not isinstance(raw_edges, list):
        raise GridFormatError("edge list must be an array", field="edges")

    powers: List[Tuple[int, float]] = []
    kinds: Dict[int, NodeKind] = {}
    for idx, entry in enumerate(raw_nodes):
        if not isinstance(entry, Mapping):
            raise GridFormatError("node entry must be an object", field=f"nodes[{idx}]")
        try:
            bus = int(entry["id"])
        except (KeyError, TypeError, ValueError):
            raise GridFormatError("missing or invalid id", field=f"nodes[{idx}].id") from None
        try:
            p = float(entry["p"])
        except (KeyError, TypeError, ValueError):
            raise GridFormatError("missing or invalid power", field=f"nodes[{idx}].p") from None
        if "kind" in entry:
            try:
                kinds[bus] = NodeKind(entry["kind"])
            except ValueError:
                raise GridFormatError(
                    f"unknown kind {entry['kind']!r}", field=f"nodes[{idx}].kind"
                ) from None
        powers.append((bus, p))

    lines: List[Tuple[int, int]] = []
    for idx, pair in enumerate(raw_edges):
        if not (isinstance(pair, Sequence) and len(pair) == 2):
            raise GridFormatError("edge must be a pair of bus ids", field=f"edges[{idx}]")
        try:
            lines.append((int(pair[0]), int(pair[1])))
        except (TypeError, ValueError):
            raise GridFormatError(
                "edge endpoints must be integers", field=f"edges[{idx}]"
            ) from None

    return build_grid(powers, lines, name=str(doc.get("name", name)), kinds=kinds)


def save_grid(grid: Grid, path: str | Path) -> None:
    text = json.dumps(grid_to_dict(grid), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_grid(
    path: str | Path, format: str = "native", *, exclude_compensators: bool = False
) -> Grid:
    """Load and validate a grid from a native JSON file or a MATPOWER case."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise GridFormatError(f"cannot read {p}: {exc.strerror}") from None

    if format == "matpower":
        from .matpower import parse_matpower

        grid = parse_matpower(text, name=p.stem, exclude_compensators=exclude_compensators)
    elif format == "native":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GridFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
        grid = grid_from_dict(doc, name=p.stem)
    else:
        raise GridFormatError(f"unknown grid format {format!r}", field="format")

    logger.info(
        "loaded grid %s: n=%d edges=%d n_g=%d P_tot=%.3f MW",
        grid.name,
        grid.n,
        len(grid.edges),
        grid.n_g,
        grid.p_total,
    )
    return grid


# ---------------------------------------------------------------------
# Partition JSON: {"0": [bus, ...], "1": [...]}
# ---------------------------------------------------------------------
def partition_from_dict(doc: Mapping[str, Any], grid: Grid) -> Partition:
    """Decode a partition document; coverage is checked, connectivity is not."""
    if not isinstance(doc, Mapping) or not doc:
        raise GridFormatError("partition document must be a non-empty JSON object")
    try:
        labels = sorted(int(k) for k in doc)
    except ValueError:
        raise GridFormatError("island keys must be integers", field="islands") from None
    if labels != list(range(len(labels))):
        raise GridFormatError("island keys must be 0..n_mu-1", field="islands")

    assignment: Dict[int, int] = {}
    for key, buses in doc.items():
        if not isinstance(buses, list):
            raise GridFormatError("island must list bus ids", field=str(key))
        for bus in buses:
            try:
                i = grid.index_of_bus[int(bus)]
            except (KeyError, TypeError, ValueError):
                raise GridFormatError(f"unknown bus {bus!r}", field=str(key)) from None
            if i in assignment:
                raise CoverageError(f"bus {bus} listed in more than one island")
            assignment[i] = int(key)

    missing = [grid.bus(i) for i in range(grid.n) if i not in assignment]
    if missing:
        raise CoverageError(f"buses not assigned to any island: {missing[:10]}")
    return Partition(assignment=tuple(assignment[i] for i in range(grid.n)), n_mu=len(labels))


def read_partition(path: str | Path, grid: Grid) -> Partition:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    except OSError as exc:
        raise GridFormatError(f"cannot read {path}: {exc.strerror}") from None
    return partition_from_dict(doc, grid)


def save_partition(part: Partition, grid: Grid, path: str | Path) -> None:
    text = json.dumps(part.to_buses(grid), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


# ---------------------------------------------------------------------
# Cut-set text: one "a-b" bus pair per line, '#' starts a comment
# ---------------------------------------------------------------------
def parse_cut_set(text: str) -> List[Tuple[int, int]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        # tolerate comma separated pairs on one line, as printed in result tables
        for chunk in filter(None, (c.strip() for c in line.split(","))):
            m = _CUT_LINE_RE.match(chunk)
            if not m:
                raise GridFormatError(f"expected 'a-b', got {chunk!r}", line=lineno)
            pairs.append((int(m.group(1)), int(m.group(2))))
    return pairs


def read_cut_set(path: str | Path) -> List[Tuple[int, int]]:
    try:
        return parse_cut_set(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise GridFormatError(f"cannot read {path}: {exc.strerror}") from None


def format_cut_set(pairs: Sequence[Tuple[int, int]]) -> str:
    return "".join(f"{a}-{b}\n" for a, b in pairs)
