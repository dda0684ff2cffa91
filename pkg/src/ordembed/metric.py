"""Finite metric spaces and simple graphs.

Distances are unitless doubles; disconnected pairs of a graph metric carry an
infinite sentinel internally and must be capped before serialization.  All
indexing is 0-based.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ordembed import kernels
from ordembed._util import map_chunks, split_range

INFINITE = float("inf")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FiniteMetricSpace:
    """n points with a symmetric nonnegative distance matrix (zero diagonal).

    The constructor only enforces shape; metric axioms are checked (and
    violations reported, not raised) by :func:`check_metric`.
    """

    n: int
    dist: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=np.float64)
        if d.shape != (self.n, self.n):
            raise ValueError(f"dist must be {self.n}x{self.n}, got {d.shape}")
        if self.n < 1:
            raise ValueError("a metric space needs at least one point")
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "dist", d)

    @property
    def is_finite(self):
        return bool(np.all(np.isfinite(self.dist)))

    def capped(self, cap):
        """Replace infinite entries by ``cap`` (a positive real)."""
        if not (cap > 0):
            raise ValueError("cap must be positive")
        d = self.dist.copy()
        d[np.isinf(d)] = float(cap)
        return FiniteMetricSpace(self.n, d)


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected unweighted graph; edges are unordered 0-indexed pairs."""

    n: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        canon = []
        seen = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            canon.append((u, v))
        canon.sort()
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def m(self):
        return len(self.edges)

    def edge_set(self):
        return frozenset(self.edges)

    def incident_edges(self, v):
        return [e for e in self.edges if v in e]

    def adjacency_csr(self):
        """CSR arrays (indptr, indices) with sorted neighbor lists."""
        deg = np.zeros(self.n + 1, dtype=np.int32)
        for u, v in self.edges:
            deg[u + 1] += 1
            deg[v + 1] += 1
        indptr = np.cumsum(deg, dtype=np.int32)
        indices = np.empty(2 * self.m, dtype=np.int32)
        fill = indptr[:-1].copy()
        for u, v in self.edges:
            indices[fill[u]] = v
            fill[u] += 1
            indices[fill[v]] = u
            fill[v] += 1
        for v in range(self.n):
            indices[indptr[v]:indptr[v + 1]].sort()
        return indptr, indices

    def adjacency_lists(self):
        indptr, indices = self.adjacency_csr()
        return [indices[indptr[v]:indptr[v + 1]] for v in range(self.n)]


def metric_from_graph(g, disconnected_cap=INFINITE, threads=1):
    """Shortest-path (hop count) metric of ``g``.

    Pairs in different components get ``disconnected_cap``; pass the default
    infinite sentinel for internal use, a finite positive cap for export.
    """
    if isinstance(disconnected_cap, str):
        if disconnected_cap != "infinite":
            raise ValueError("disconnected_cap must be a positive real or 'infinite'")
        cap = INFINITE
    else:
        cap = float(disconnected_cap)
        if not cap > 0:
            raise ValueError("disconnected_cap must be positive")
    indptr, indices = g.adjacency_csr()
    sources = np.arange(g.n, dtype=np.int32)

    def run(rows):
        return kernels.bfs_from_sources(g.n, indptr, indices, sources[rows.start:rows.stop])

    blocks = map_chunks(run, split_range(g.n, threads), threads)
    hops = np.vstack(blocks)
    dist = hops.astype(np.float64)
    dist[hops < 0] = cap
    return FiniteMetricSpace(g.n, dist)


def girth(g):
    """Length of the shortest cycle, or None for a forest.

    BFS from every vertex; the global minimum over the non-tree-edge cycle
    candidates dist(u)+dist(w)+1 is exactly the girth.
    """
    adj = g.adjacency_lists()
    best = None
    dist = np.empty(g.n, dtype=np.int64)
    parent = np.empty(g.n, dtype=np.int64)
    for s in range(g.n):
        dist.fill(-1)
        parent.fill(-1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if best is not None and dist[u] * 2 >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(int(w))
                elif w != parent[u]:
                    cand = int(dist[u] + dist[w] + 1)
                    if best is None or cand < best:
                        best = cand
    return best


@dataclass
class MetricCheckReport:
    """Axiom violations of a distance matrix; empty everywhere iff a metric."""

    asymmetry: list
    diagonal: list
    nonpositive: list
    triangle: list

    @property
    def ok(self):
        return not (self.asymmetry or self.diagonal or self.nonpositive or self.triangle)

    def to_dict(self):
        return {
            "ok": self.ok,
            "asymmetry": [list(t) for t in self.asymmetry],
            "diagonal": list(self.diagonal),
            "nonpositive": [list(t) for t in self.nonpositive],
            "triangle": [list(t) for t in self.triangle],
        }


def check_metric(space, tol=DEFAULT_TOL):
    """Report every violated metric axiom with witnessing indices."""
    d = space.dist
    n = space.n
    asym = np.argwhere(~(np.abs(d - d.T) <= tol) & ~(np.isinf(d) & np.isinf(d.T)))
    asymmetry = [(int(i), int(j)) for i, j in asym if i < j]
    diagonal = [int(i) for i in range(n) if not abs(d[i, i]) <= tol]
    off = ~np.eye(n, dtype=bool)
    bad = off & ~(d > tol)
    nonpositive = [(int(i), int(j)) for i, j in np.argwhere(bad) if i < j]
    triangle = []
    # d[i,k] > d[i,j] + d[j,k] + tol, scanned in i-chunks to bound memory
    for rows in split_range(n, max(1, n // 64)):
        i0 = rows.start
        lhs = d[rows.start:rows.stop, None, :]
        rhs = d[rows.start:rows.stop, :, None] + d[None, :, :]
        viol = lhs > rhs + tol
        for i, j, k in np.argwhere(viol):
            if j != i + i0 and j != k and i + i0 != k:
                triangle.append((int(i + i0), int(j), int(k)))
    return MetricCheckReport(asymmetry, diagonal, nonpositive, triangle)


def require_metric(space, tol=DEFAULT_TOL, what="metric"):
    report = check_metric(space, tol)
    if not report.ok:
        raise ValueError(f"{what} violates metric axioms: {report.to_dict()}")
    return space


# -- small catalog of named graphs (used by tests and the CLI) --------------

def path_graph(n):
    return SimpleGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return SimpleGraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return SimpleGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen_graph():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SimpleGraph(10, edges)


def heawood_graph():
    """The (3,6)-cage: 14 vertices, 21 edges, girth 6 (LCF [5,-5]^7)."""
    edges = [(i, (i + 1) % 14) for i in range(14)]
    edges += [(i, (i + 5) % 14) for i in range(0, 14, 2)]
    return SimpleGraph(14, edges)


NAMED_GRAPHS = {
    "petersen": petersen_graph,
    "heawood": heawood_graph,
}
