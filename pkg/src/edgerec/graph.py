"""Static graph with canonical ordering, incidence matrix, and line graph.

The canonical ordering is the backbone of reproducibility in this package:
node ids are sorted lexicographically, edges are ``(u, v)`` index pairs with
``u < v`` sorted lexicographically, and every matrix in the pipeline uses
that order for its rows. Building the same topology from any permutation of
the input yields an identical graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataValidationError

__all__ = [
    "Graph",
    "ActiveSubgraph",
    "build_graph",
    "incidence",
    "line_graph",
    "line_graph_adjacency",
    "active_subgraph",
    "subgraph",
]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph in canonical order.

    Attributes
    ----------
    node_ids : tuple of str
        Node identifiers, lexicographically sorted.
    edges : tuple of (int, int)
        Index pairs with ``u < v``, lexicographically sorted.
    """

    node_ids: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        deg.setflags(write=False)
        return deg

    def mean_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def edge_label(self, e: int) -> str:
        u, v = self.edges[e]
        return f"{self.node_ids[u]}--{self.node_ids[v]}"


@dataclass(frozen=True)
class ActiveSubgraph:
    """Nodes and edges active at one timestep, as indices into the parent graph."""

    timestep: int
    node_subset: tuple[int, ...]
    edge_subset: tuple[int, ...]


def build_graph(edge_list: Iterable[tuple[str, str]],
                nodes: Iterable[str] = ()) -> Graph:
    """Build a canonical :class:`Graph` from string id pairs.

    Duplicate pairs are merged and ``(a, b)`` is identified with ``(b, a)``.
    Extra ids in `nodes` become isolated nodes.

    Raises
    ------
    DataValidationError
        On self-loops, empty/non-string ids, or an empty node set.
    """
    ids: set[str] = set()
    pairs: list[tuple[str, str]] = []
    for a, b in edge_list:
        _check_id(a)
        _check_id(b)
        if a == b:
            raise DataValidationError(f"self-loop edge ({a!r}, {b!r}) is not allowed")
        ids.add(a)
        ids.add(b)
        pairs.append((a, b))
    for extra in nodes:
        _check_id(extra)
        ids.add(extra)
    if not ids:
        raise DataValidationError("graph must have at least one node")
    node_ids = tuple(sorted(ids))
    index = {name: i for i, name in enumerate(node_ids)}
    edge_set = {tuple(sorted((index[a], index[b]))) for a, b in pairs}
    return Graph(node_ids=node_ids, edges=tuple(sorted(edge_set)))


def _check_id(name: object) -> None:
    if not isinstance(name, str) or not name:
        raise DataValidationError(f"node id must be a nonempty string, got {name!r}")


def incidence(g: Graph) -> sp.csc_array:
    """Unoriented incidence matrix of `g` as a sparse ``n x m`` binary array.

    Column ``j`` has ones at the two endpoints of edge ``j``; every column
    sums to 2 and row ``i`` sums to the degree of node ``i``.
    """
    indptr = np.arange(0, 2 * g.m + 1, 2)
    indices = np.fromiter((i for e in g.edges for i in e), dtype=np.int32,
                          count=2 * g.m)
    data = np.ones(2 * g.m, dtype=np.float64)
    return sp.csc_array((data, indices, indptr), shape=(g.n, g.m))


def line_graph(g: Graph) -> Graph:
    """Graph whose nodes are the edges of `g`, adjacent iff they share an endpoint.

    Line-graph node ids are ``"<u_id>--<v_id>"`` labels of the original edges.
    An edgeless input yields an empty (zero-node) graph.
    """
    if g.m == 0:
        return Graph(node_ids=(), edges=())
    labels = [g.edge_label(e) for e in range(g.m)]
    pairs = [(labels[a], labels[b]) for a, b in _shared_endpoint_pairs(g)]
    return build_graph(pairs, nodes=labels)


def line_graph_adjacency(g: Graph) -> np.ndarray:
    """Dense adjacency of the line graph, indexed in `g`'s canonical edge order."""
    adj = np.zeros((g.m, g.m), dtype=np.float64)
    for a, b in _shared_endpoint_pairs(g):
        adj[a, b] = adj[b, a] = 1.0
    return adj


def _shared_endpoint_pairs(g: Graph) -> Iterable[tuple[int, int]]:
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for e, (u, v) in enumerate(g.edges):
        incident[u].append(e)
        incident[v].append(e)
    for edges_at_node in incident:
        for i, a in enumerate(edges_at_node):
            for b in edges_at_node[i + 1:]:
                yield (a, b) if a < b else (b, a)


def active_subgraph(g: Graph, e_values, t: int, eps: float = 0.0) -> ActiveSubgraph:
    """Edges with activity above `eps` at timestep `t`, plus their endpoints.

    `e_values` may be an :class:`~edgerec.activity.EdgeActivityMatrix` or a
    plain ``(m, T)`` array.
    """
    vals = np.asarray(getattr(e_values, "values", e_values), dtype=np.float64)
    if vals.shape[0] != g.m:
        raise DataValidationError(
            f"activity has {vals.shape[0]} rows but graph has {g.m} edges")
    if not 0 <= t < vals.shape[1]:
        raise DataValidationError(f"timestep {t} out of range [0, {vals.shape[1]})")
    edge_subset = tuple(int(e) for e in np.flatnonzero(vals[:, t] > eps))
    node_set: set[int] = set()
    for e in edge_subset:
        node_set.update(g.edges[e])
    return ActiveSubgraph(timestep=t, node_subset=tuple(sorted(node_set)),
                          edge_subset=edge_subset)


def subgraph(g: Graph, edge_subset: Sequence[int]) -> Graph:
    """Canonical graph induced by a subset of edge indices (isolated nodes dropped)."""
    pairs = [(g.node_ids[u], g.node_ids[v]) for u, v in
             (g.edges[e] for e in edge_subset)]
    if not pairs:
        raise DataValidationError("edge subset is empty")
    return build_graph(pairs)
