import numpy as np
import pytest

from ordembed.metric import FiniteMetricSpace, SimpleGraph, metric_from_graph


def random_connected_graph(n, rng, extra=0.15):
    """Random tree plus extra edges; always connected."""
    edges = []
    for v in range(1, n):
        edges.append((int(rng.integers(0, v)), v))
    present = set(edges)
    iu, iv = np.triu_indices(n, 1)
    mask = rng.random(iu.size) < extra
    for u, v in zip(iu[mask], iv[mask]):
        if (int(u), int(v)) not in present:
            present.add((int(u), int(v)))
            edges.append((int(u), int(v)))
    return SimpleGraph(n, edges)


def random_graph_metric(n, rng, extra=0.15):
    return metric_from_graph(random_connected_graph(n, rng, extra))


def random_point_cloud_metric(n, d, rng):
    pts = rng.standard_normal((n, d))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, 0.0)
    dist = np.triu(dist, 1)
    return FiniteMetricSpace(n, dist + dist.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
