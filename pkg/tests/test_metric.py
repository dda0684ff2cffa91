import itertools

import numpy as np
import pytest

from ordembed.metric import (
    FiniteMetricSpace,
    SimpleGraph,
    check_metric,
    complete_graph,
    cycle_graph,
    girth,
    heawood_graph,
    metric_from_graph,
    path_graph,
    petersen_graph,
)

from conftest import random_connected_graph


def exhaustive_girth(g):
    """Independent oracle: for each edge, remove it and BFS between its
    endpoints; shortest such cycle is the girth."""
    from collections import deque

    best = None
    adj = {v: set() for v in range(g.n)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    for u, v in g.edges:
        adj[u].discard(v)
        adj[v].discard(u)
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if v in dist:
            cand = dist[v] + 1
            best = cand if best is None or cand < best else best
        adj[u].add(v)
        adj[v].add(u)
    return best


def test_graph_validation():
    with pytest.raises(ValueError, match="self-loop"):
        SimpleGraph(3, [(1, 1)])
    with pytest.raises(ValueError, match="duplicate"):
        SimpleGraph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError, match="out of range"):
        SimpleGraph(3, [(0, 3)])


def test_path_metric():
    space = metric_from_graph(path_graph(3))
    assert space.dist[0, 1] == 1 and space.dist[1, 2] == 1 and space.dist[0, 2] == 2


def test_four_cycle_opposite_vertices():
    space = metric_from_graph(cycle_graph(4))
    assert space.dist[0, 2] == 2 and space.dist[1, 3] == 2


def test_petersen_distances_one_or_two():
    g = petersen_graph()
    space = metric_from_graph(g)
    off = space.dist[~np.eye(10, dtype=bool)]
    assert set(np.unique(off)) == {1.0, 2.0}
    # independent oracle: adjacency matrix powers give reachability by <=2 hops
    A = np.zeros((10, 10))
    for u, v in g.edges:
        A[u, v] = A[v, u] = 1
    two_hop = A + A @ A
    assert np.all(two_hop[~np.eye(10, dtype=bool)] > 0)


def test_disconnected_cap_and_sentinel():
    g = SimpleGraph(4, [(0, 1), (2, 3)])
    space = metric_from_graph(g)
    assert np.isinf(space.dist[0, 2])
    capped = metric_from_graph(g, disconnected_cap=4)
    assert capped.dist[0, 2] == 4 and capped.dist[0, 1] == 1
    assert space.capped(4).dist[0, 2] == 4
    with pytest.raises(ValueError):
        metric_from_graph(g, disconnected_cap=-1)


def test_girth_examples():
    assert girth(complete_graph(3)) == 3
    assert girth(cycle_graph(5)) == 5
    assert girth(heawood_graph()) == 6
    assert girth(path_graph(6)) is None
    assert girth(SimpleGraph(3, [])) is None


def test_girth_matches_exhaustive_oracle(rng):
    for trial in range(30):
        n = int(rng.integers(4, 26))
        g = random_connected_graph(n, rng, extra=float(rng.random() * 0.3))
        assert girth(g) == exhaustive_girth(g), f"trial {trial}"


def test_girth_at_least_four_implies_triangle_free(rng):
    for _ in range(20):
        n = int(rng.integers(4, 50))
        g = random_connected_graph(n, rng, extra=0.1)
        if (girth(g) or 10 ** 9) >= 4:
            edge_set = g.edge_set()
            for a, b, c in itertools.combinations(range(n), 3):
                assert not (
                    (a, b) in edge_set and (b, c) in edge_set and (a, c) in edge_set
                )


def test_graph_metric_always_valid_and_integral(rng):
    for _ in range(10):
        n = int(rng.integers(2, 40))
        g = random_connected_graph(n, rng)
        space = metric_from_graph(g)
        assert check_metric(space).ok
        off = space.dist[~np.eye(n, dtype=bool)]
        assert np.all(off == np.round(off))
        assert off.min() >= 1 and off.max() <= n - 1


def test_check_metric_triangle_violation():
    dist = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    report = check_metric(FiniteMetricSpace(3, dist))
    assert not report.ok
    assert (0, 1, 2) in report.triangle


def test_check_metric_asymmetry():
    dist = np.array([[0, 1, 2], [3, 0, 1], [2, 1, 0]], dtype=float)
    report = check_metric(FiniteMetricSpace(3, dist))
    assert report.asymmetry == [(0, 1)]


def test_check_metric_diagonal_and_nonpositive():
    dist = np.array([[0.5, 1.0], [1.0, 0.0]])
    report = check_metric(FiniteMetricSpace(2, dist))
    assert report.diagonal == [0]
    dist = np.array([[0.0, 0.0], [0.0, 0.0]])
    report = check_metric(FiniteMetricSpace(2, dist))
    assert report.nonpositive == [(0, 1)]


def test_bfs_thread_count_does_not_change_result():
    g = heawood_graph()
    a = metric_from_graph(g, threads=1)
    b = metric_from_graph(g, threads=8)
    assert np.array_equal(a.dist, b.dist)
