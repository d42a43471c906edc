"""Seeded synthetic graphs and edge activities for oracle-verified tests.

All randomness flows through numpy's PCG64 generator keyed by
``SeedSequence(seed, spawn_key=(stream,))``, so the same spec reproduces
bit-identical fixtures on any platform; graph topology and activity use
separate streams and can be generated independently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activity import EdgeActivityMatrix, Window
from .errors import DataValidationError
from .graph import Graph, build_graph

__all__ = ["ScenarioSpec", "gen_graph", "gen_activity"]

TOPOLOGIES = ("tree", "cycle", "unicyclic", "erdos-renyi", "star")
VALUE_DISTS = ("unit", "uniform", "geometric-counts")


@dataclass(frozen=True)
class ScenarioSpec:
    """One synthetic scenario: a topology plus an activity pattern.

    ``n_edges`` applies to erdos-renyi only; ``cycle_parity`` ("odd"/"even")
    to unicyclic only. ``dist_params`` carries ``(a, b)`` for uniform and
    ``(p,)`` for geometric-counts.
    """

    topology: str
    n_nodes: int
    n_edges: int | None = None
    cycle_parity: str = "odd"
    timesteps: int = 1
    activity_density: float = 0.0
    value_dist: str = "unit"
    dist_params: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise DataValidationError(f"unknown topology {self.topology!r}")
        if self.n_nodes < 1:
            raise DataValidationError("n_nodes must be >= 1")
        if self.timesteps < 1:
            raise DataValidationError("timesteps must be >= 1")
        if not 0.0 <= self.activity_density <= 1.0:
            raise DataValidationError(
                f"activity_density must lie in [0, 1], got {self.activity_density}")
        if self.value_dist not in VALUE_DISTS:
            raise DataValidationError(f"unknown value_dist {self.value_dist!r}")
        if self.cycle_parity not in ("odd", "even"):
            raise DataValidationError(f"cycle_parity must be odd or even")


def _rng(spec: ScenarioSpec, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=spec.seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def _node_ids(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"n{i:0{width}d}" for i in range(n)]


def gen_graph(spec: ScenarioSpec) -> Graph:
    """Generate the canonical graph for `spec`, deterministic per seed."""
    rng = _rng(spec, 0)
    n = spec.n_nodes
    if spec.topology == "tree":
        pairs = _random_tree(n, rng)
    elif spec.topology == "cycle":
        if n < 3:
            raise DataValidationError(f"a cycle needs >= 3 nodes, got {n}")
        pairs = [(i, (i + 1) % n) for i in range(n)]
    elif spec.topology == "unicyclic":
        pairs = _unicyclic(n, spec.cycle_parity, rng)
    elif spec.topology == "star":
        if n < 2:
            raise DataValidationError(f"a star needs >= 2 nodes, got {n}")
        pairs = [(0, i) for i in range(1, n)]
    else:  # erdos-renyi
        pairs = _gnm(n, spec.n_edges, rng)
    ids = _node_ids(n)
    return build_graph([(ids[a], ids[b]) for a, b in pairs], nodes=ids)


def _random_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform labeled tree by decoding a random Pruefer sequence."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    import heapq

    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, int(x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, int(x))
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def _unicyclic(n: int, parity: str, rng: np.random.Generator) -> list[tuple[int, int]]:
    lo = 3 if parity == "odd" else 4
    lengths = [c for c in range(lo, n + 1) if c % 2 == (1 if parity == "odd" else 0)]
    if not lengths:
        raise DataValidationError(
            f"no {parity} cycle length fits in {n} nodes")
    c = int(rng.choice(lengths))
    pairs = [(i, (i + 1) % c) for i in range(c)]
    for i in range(c, n):
        pairs.append((int(rng.integers(0, i)), i))
    return pairs


def _gnm(n: int, m: int | None, rng: np.random.Generator) -> list[tuple[int, int]]:
    """G(n, m): m distinct edges drawn uniformly without replacement."""
    if m is None:
        raise DataValidationError("erdos-renyi requires n_edges")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise DataValidationError(
            f"cannot place {m} distinct edges on {n} nodes (max {total})")
    if m == 0:
        return []
    flat = rng.choice(total, size=m, replace=False)
    starts = np.concatenate(([0], np.cumsum(np.arange(n - 1, 0, -1))))
    row = np.searchsorted(starts, flat, side="right") - 1
    col = flat - starts[row] + row + 1
    return [(int(a), int(b)) for a, b in zip(row, col)]


def gen_activity(g: Graph, spec: ScenarioSpec) -> EdgeActivityMatrix:
    """Independent per-entry activity: each entry is nonzero with probability
    ``activity_density`` and draws its value from ``value_dist``.

    No temporal autocorrelation is modeled; the point is controllable
    sparsity, deterministic per seed.
    """
    rng = _rng(spec, 1)
    shape = (g.m, spec.timesteps)
    mask = rng.random(shape) < spec.activity_density
    if spec.value_dist == "unit":
        values = np.ones(shape)
    elif spec.value_dist == "uniform":
        if len(spec.dist_params) != 2:
            raise DataValidationError("uniform values need params (a, b)")
        a, b = spec.dist_params
        if not 0 <= a <= b:
            raise DataValidationError(f"uniform bounds must satisfy 0 <= a <= b, got {a}, {b}")
        values = rng.uniform(a, b, size=shape)
    else:  # geometric-counts
        if len(spec.dist_params) != 1:
            raise DataValidationError("geometric-counts needs param (p,)")
        p = spec.dist_params[0]
        if not 0 < p <= 1:
            raise DataValidationError(f"geometric p must lie in (0, 1], got {p}")
        values = rng.geometric(p, size=shape).astype(np.float64)
    return EdgeActivityMatrix(np.where(mask, values, 0.0), window=Window(0.0, 1.0))
