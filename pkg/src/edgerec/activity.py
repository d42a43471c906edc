"""Edge and node activity matrices, event windowing, and the node projection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DataValidationError
from .graph import Graph, build_graph

__all__ = [
    "Window",
    "Event",
    "EdgeActivityMatrix",
    "NodeActivityMatrix",
    "WindowedEvents",
    "window_events",
    "project",
    "as_values",
]


@dataclass(frozen=True)
class Window:
    """Uniform time windowing: origin `t0`, width `dt` (timestep count comes from the matrix)."""

    t0: float
    dt: float


class Event(NamedTuple):
    """One timestamped interaction between two distinct nodes."""

    source: str
    target: str
    time: float
    count: float = 1.0


def _validated(values, kind: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise DataValidationError(f"{kind} activity must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataValidationError(f"{kind} activity contains non-finite entries")
    if np.any(arr < 0):
        raise DataValidationError(f"{kind} activity must be nonnegative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EdgeActivityMatrix:
    """Nonnegative ``(m, T)`` activity per edge per timestep, rows in canonical edge order."""

    values: np.ndarray
    window: Window | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, "edge"))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class NodeActivityMatrix:
    """Nonnegative ``(n, T)`` aggregated node activity, rows in canonical node order."""

    values: np.ndarray
    window: Window | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, "node"))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]


def as_values(x) -> np.ndarray:
    """Array view of an activity matrix or plain array argument."""
    return np.asarray(getattr(x, "values", x), dtype=np.float64)


class WindowedEvents(NamedTuple):
    graph: Graph
    edge_activity: EdgeActivityMatrix
    dropped: int


def window_events(events: Iterable[Event], t0: float, dt: float,
                  num_windows: int) -> WindowedEvents:
    """Bin events into half-open windows ``[t0 + t*dt, t0 + (t+1)*dt)``.

    Parameters
    ----------
    events : iterable of Event
        Timestamped interactions; counts default to 1.
    t0, dt : float
        Window origin and width, ``dt > 0``.
    num_windows : int
        Number of windows ``T >= 1``.

    Returns
    -------
    WindowedEvents
        Graph of edges with at least one in-range event, the binned
        ``(m, T)`` edge activity, and the number of dropped (out-of-range)
        events.

    Raises
    ------
    DataValidationError
        If the event list is empty, an event is a self-loop or non-finite,
        or every event falls outside the covered range.
    """
    if dt <= 0:
        raise DataValidationError(f"window width must be positive, got {dt}")
    if num_windows < 1:
        raise DataValidationError(f"window count must be >= 1, got {num_windows}")
    records = [Event(*ev) for ev in events]
    if not records:
        raise DataValidationError("empty event list")

    end = t0 + num_windows * dt
    kept: list[tuple[str, str, int, float]] = []
    dropped = 0
    for ev in records:
        if not math.isfinite(ev.time):
            raise DataValidationError(f"event time must be finite, got {ev.time!r}")
        if ev.source == ev.target:
            raise DataValidationError(
                f"self-loop event ({ev.source!r}, {ev.target!r}) is not allowed")
        if ev.count <= 0 or not math.isfinite(ev.count):
            raise DataValidationError(f"event count must be positive, got {ev.count!r}")
        bin_idx = math.floor((ev.time - t0) / dt)
        if ev.time >= t0 and 0 <= bin_idx < num_windows:
            kept.append((ev.source, ev.target, bin_idx, ev.count))
        else:
            dropped += 1
    if not kept:
        raise DataValidationError(
            f"all {dropped} events fall outside the window range [{t0}, {end})")

    g = build_graph([(s, t) for s, t, _, _ in kept])
    edge_index = {e: j for j, e in enumerate(g.edges)}
    node_index = {name: i for i, name in enumerate(g.node_ids)}
    values = np.zeros((g.m, num_windows), dtype=np.float64)
    for s, t, bin_idx, count in kept:
        key = tuple(sorted((node_index[s], node_index[t])))
        values[edge_index[key], bin_idx] += count
    ea = EdgeActivityMatrix(values, window=Window(t0=float(t0), dt=float(dt)))
    return WindowedEvents(graph=g, edge_activity=ea, dropped=dropped)


def project(B, E) -> NodeActivityMatrix:
    """Aggregate edge activity onto nodes: ``N = B @ E``.

    Each interaction contributes to both endpoints, so column sums of the
    result are exactly twice the column sums of `E`.
    """
    e_vals = as_values(E)
    if B.shape[1] != e_vals.shape[0]:
        raise DataValidationError(
            f"incidence is {B.shape[0]}x{B.shape[1]} but edge activity has "
            f"{e_vals.shape[0]} rows")
    n_vals = np.asarray(B @ e_vals, dtype=np.float64)
    return NodeActivityMatrix(n_vals, window=getattr(E, "window", None))
