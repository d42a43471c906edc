"""File formats for the CLI: events CSV, graph JSON, matrix grids, reports.

Matrices are plain comma-separated numeric grids (rows in canonical edge or
node order, columns are timesteps) with a JSON sidecar carrying the window
and a content hash of the graph file, so mismatched graph/matrix joins fail
loudly instead of silently misaligning rows.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .activity import Event, Window
from .errors import DataValidationError
from .graph import Graph

__all__ = [
    "read_events",
    "write_events",
    "read_graph",
    "write_graph",
    "graph_sha256",
    "read_matrix",
    "write_matrix",
    "write_report",
    "write_table",
    "sidecar_path",
]

EVENT_COLUMNS = ("source", "target", "time", "count")


def read_events(path) -> list[Event]:
    """Parse a `source,target,time[,count]` CSV; errors name line and column."""
    path = Path(path)
    events: list[Event] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise DataValidationError(f"{path}: empty events file")
        for col in ("source", "target", "time"):
            if col not in header:
                raise DataValidationError(f"{path}: missing required column {col!r}")
        for row in reader:
            line = reader.line_num
            source = (row.get("source") or "").strip()
            target = (row.get("target") or "").strip()
            if not source or not target:
                col = "source" if not source else "target"
                raise DataValidationError(f"{path}: line {line}: empty {col!r}")
            time = _parse_float(row.get("time"), path, line, "time")
            raw_count = (row.get("count") or "").strip() if "count" in (header or ()) else ""
            count = _parse_float(raw_count, path, line, "count") if raw_count else 1.0
            events.append(Event(source=source, target=target, time=time, count=count))
    if not events:
        raise DataValidationError(f"{path}: no event rows")
    return events


def _parse_float(raw, path, line, col) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise DataValidationError(
            f"{path}: line {line}: column {col!r}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise DataValidationError(
            f"{path}: line {line}: column {col!r}: non-finite value {raw!r}")
    return value


def write_events(path, events) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_COLUMNS)
        for ev in events:
            writer.writerow([ev.source, ev.target, _fmt(ev.time), _fmt(ev.count)])


def write_graph(path, g: Graph) -> None:
    doc = {"nodes": list(g.node_ids), "edges": [list(e) for e in g.edges]}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def read_graph(path) -> Graph:
    """Load and validate a canonical graph file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path}: invalid JSON: {exc}") from None
    nodes = doc.get("nodes")
    edges = doc.get("edges")
    if not isinstance(nodes, list) or not all(isinstance(x, str) and x for x in nodes):
        raise DataValidationError(f"{path}: 'nodes' must be a list of nonempty strings")
    if list(nodes) != sorted(set(nodes)):
        raise DataValidationError(f"{path}: 'nodes' must be sorted and unique")
    if not nodes:
        raise DataValidationError(f"{path}: graph must have at least one node")
    if not isinstance(edges, list):
        raise DataValidationError(f"{path}: 'edges' must be a list of index pairs")
    pairs: list[tuple[int, int]] = []
    for k, pair in enumerate(edges):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, int) for x in pair)):
            raise DataValidationError(f"{path}: edge #{k} is not an index pair")
        u, v = pair
        if not (0 <= u < v < len(nodes)):
            raise DataValidationError(
                f"{path}: edge #{k} [{u}, {v}] violates 0 <= u < v < n")
        pairs.append((u, v))
    if pairs != sorted(set(pairs)):
        raise DataValidationError(f"{path}: 'edges' must be sorted and unique")
    return Graph(node_ids=tuple(nodes), edges=tuple(pairs))


def graph_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sidecar_path(matrix_path) -> Path:
    return Path(matrix_path).with_suffix(".meta.json")


def write_matrix(path, values, *, kind: str, window: Window | None = None,
                 graph_path=None) -> None:
    """Write a numeric grid plus its `.meta.json` sidecar."""
    path = Path(path)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DataValidationError(f"matrix must be 2-D, got shape {arr.shape}")
    lines = [",".join(_fmt(x) for x in row) for row in arr]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    meta = {
        "kind": kind,
        "rows": int(arr.shape[0]),
        "T": int(arr.shape[1]),
        "t0": window.t0 if window else 0.0,
        "dt": window.dt if window else 1.0,
        "graph_sha256": graph_sha256(graph_path) if graph_path else None,
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")


def read_matrix(path, *, graph_path=None, expect_kind: str | None = None):
    """Read a grid and its sidecar; verify the graph hash when `graph_path` is given.

    Returns ``(values, meta)`` with the window under ``meta``.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    rows: list[list[float]] = []
    width = None
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataValidationError(
                f"{path}: line {i}: expected {width} columns, got {len(cells)}")
        parsed = []
        for j, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise DataValidationError(
                    f"{path}: line {i}: column {j}: not a number: {cell.strip()!r}") from None
        rows.append(parsed)
    if not rows:
        raise DataValidationError(f"{path}: empty matrix file")
    values = np.asarray(rows, dtype=np.float64)

    meta_file = sidecar_path(path)
    if not meta_file.exists():
        raise DataValidationError(f"{path}: missing sidecar {meta_file.name}")
    meta = json.loads(meta_file.read_text(encoding="utf-8"))
    if meta.get("rows") != values.shape[0] or meta.get("T") != values.shape[1]:
        raise DataValidationError(
            f"{path}: grid is {values.shape[0]}x{values.shape[1]} but sidecar "
            f"declares {meta.get('rows')}x{meta.get('T')}")
    if expect_kind and meta.get("kind") != expect_kind:
        raise DataValidationError(
            f"{path}: sidecar kind {meta.get('kind')!r}, expected {expect_kind!r}")
    if graph_path is not None and meta.get("graph_sha256") is not None:
        actual = graph_sha256(graph_path)
        if actual != meta["graph_sha256"]:
            raise DataValidationError(
                f"{path}: sidecar was written against a different graph file "
                f"(hash {meta['graph_sha256'][:12]}..., got {actual[:12]}...)")
    return values, meta


def write_report(path, payload: dict) -> None:
    """One JSON document per command; NaN/inf become null for strict JSON."""
    Path(path).write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8")


def write_table(path, header, rows) -> None:
    """Flat plot-ready CSV: one observation per row, floats in repr form."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj
