import numpy as np
import pytest

from edgerec import (DataValidationError, ScenarioSpec, active_subgraph,
                     build_graph, gen_graph, incidence, line_graph,
                     line_graph_adjacency, subgraph)


def test_build_graph_dedup_and_symmetry():
    g = build_graph([("a", "b"), ("b", "a"), ("b", "c")])
    assert g.node_ids == ("a", "b", "c")
    assert g.edges == ((0, 1), (1, 2))
    assert g.n == 3 and g.m == 2


def test_build_graph_declared_isolated_node():
    g = build_graph([], nodes=["a"])
    assert g.n == 1 and g.m == 0


def test_build_graph_rejects_self_loop_naming_pair():
    with pytest.raises(DataValidationError, match="'a'"):
        build_graph([("a", "a")])


def test_build_graph_rejects_empty_ids():
    with pytest.raises(DataValidationError):
        build_graph([("", "b")])
    with pytest.raises(DataValidationError):
        build_graph([])


def test_canonical_order_is_permutation_invariant():
    edges = [("x", "q"), ("a", "x"), ("q", "a"), ("b", "x")]
    g1 = build_graph(edges)
    g2 = build_graph(list(reversed(edges)))
    g3 = build_graph([(b, a) for a, b in edges])
    assert g1 == g2 == g3


def test_incidence_path():
    g = build_graph([("a", "b"), ("b", "c")])
    B = incidence(g).toarray()
    assert B.tolist() == [[1, 0], [1, 1], [0, 1]]


def test_incidence_triangle_row_and_column_sums():
    g = build_graph([("a", "b"), ("b", "c"), ("a", "c")])
    B = incidence(g).toarray()
    assert np.all(B.sum(axis=0) == 2)
    assert np.all(B.sum(axis=1) == 2)


def test_incidence_copenhagen_scale_aspect_ratio():
    # m/n ~ 4.4 columns per row, i.e. mean degree ~ 8.8
    spec = ScenarioSpec(topology="erdos-renyi", n_nodes=100, n_edges=440, seed=7)
    g = gen_graph(spec)
    B = incidence(g)
    assert B.shape == (100, 440)
    assert abs(B.shape[1] / B.shape[0] - 4.4) < 1e-12
    assert abs(g.mean_degree() - 8.8) < 1e-12
    assert np.all(np.asarray(B.sum(axis=0)) == 2)


@pytest.mark.parametrize("spec", [
    ScenarioSpec(topology="tree", n_nodes=9, seed=1),
    ScenarioSpec(topology="cycle", n_nodes=6, seed=2),
    ScenarioSpec(topology="unicyclic", n_nodes=10, seed=3),
    ScenarioSpec(topology="erdos-renyi", n_nodes=12, n_edges=20, seed=4),
    ScenarioSpec(topology="star", n_nodes=7, seed=5),
])
def test_incidence_identities(spec):
    g = gen_graph(spec)
    B = incidence(g).toarray()
    assert np.all(B.sum(axis=0) == 2)
    assert np.all(B.sum(axis=1) == g.degrees)
    assert B.sum() == 2 * g.m
    # B B^T = A + D
    adj = np.zeros((g.n, g.n))
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = 1.0
    assert np.array_equal(B @ B.T, adj + np.diag(g.degrees))
    # B^T B = A_L + 2 I
    assert np.array_equal(B.T @ B, line_graph_adjacency(g) + 2 * np.eye(g.m))


def test_line_graph_path_is_single_edge():
    g = build_graph([("a", "b"), ("b", "c")])
    lg = line_graph(g)
    assert lg.n == 2 and lg.m == 1


def test_line_graph_triangle_is_triangle():
    # oracle: enumerate shared endpoints by hand; every pair shares one
    g = build_graph([("a", "b"), ("b", "c"), ("a", "c")])
    lg = line_graph(g)
    assert lg.n == 3 and lg.m == 3
    assert np.all(lg.degrees == 2)


def test_line_graph_star_is_triangle():
    # all three leaf edges share the hub
    g = build_graph([("h", "a"), ("h", "b"), ("h", "c")])
    lg = line_graph(g)
    assert lg.n == 3 and lg.m == 3


def test_line_graph_empty():
    g = build_graph([], nodes=["a"])
    assert line_graph(g).n == 0


def test_active_subgraph_cases():
    g = build_graph([("a", "b"), ("b", "c"), ("a", "c")])
    E = np.zeros((3, 3))
    E[0, 1] = 1.0  # edge (a,b) active at t=1
    E[:, 2] = 1.0
    empty = active_subgraph(g, E, 0)
    assert empty.edge_subset == () and empty.node_subset == ()
    one = active_subgraph(g, E, 1)
    assert one.edge_subset == (0,)
    assert len(one.node_subset) == 2  # one active edge activates two nodes
    full = active_subgraph(g, E, 2)
    assert full.edge_subset == (0, 1, 2)
    assert full.node_subset == (0, 1, 2)


def test_active_subgraph_nodes_match_edges():
    spec = ScenarioSpec(topology="erdos-renyi", n_nodes=10, n_edges=18,
                        timesteps=5, activity_density=0.4, seed=11)
    g = gen_graph(spec)
    from edgerec import gen_activity
    E = gen_activity(g, spec)
    for t in range(5):
        sub = active_subgraph(g, E, t)
        endpoints = {i for e in sub.edge_subset for i in g.edges[e]}
        assert set(sub.node_subset) == endpoints


def test_subgraph_reindexes_canonically():
    g = build_graph([("a", "b"), ("b", "c"), ("c", "d")])
    sg = subgraph(g, [0, 2])
    assert sg.node_ids == ("a", "b", "c", "d")
    assert sg.edges == ((0, 1), (2, 3))
