"""High-girth graphs, random edge-subgraph ensembles, witness certificates,
and the relaxation floor they force.

A pair of subgraphs is "faraway" when some vertex has an exclusive incident
edge in each.  Dropping a base edge stretches its endpoints to at least
girth - 1 hops apart, so any embedding must invert a large ratio in at least
one of the two subgraph metrics.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ordembed._util import map_chunks, rng_stream, split_range
from ordembed.metric import SimpleGraph, girth, metric_from_graph
from ordembed.verify import relaxation


@dataclass(frozen=True)
class EnsembleSpec:
    base: SimpleGraph
    N: int
    p: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("ensemble size N must be >= 2")
        if not 0.0 < self.p < 1.0:
            raise ValueError("edge-keep probability must satisfy 0 < p < 1")


@dataclass(frozen=True)
class WitnessCertificate:
    """Vertex v with an incident edge exclusive to each subgraph of the pair."""

    i: int
    j: int
    v: int
    e_i: tuple
    e_j: tuple


@dataclass
class HighGirthResult:
    graph: SimpleGraph
    girth_target: int
    girth_achieved: object  # int or None (acyclic)
    edge_target: float
    proposals: int

    @property
    def density_shortfall(self):
        return self.graph.m < self.edge_target

    def to_dict(self):
        return {
            "n": self.graph.n,
            "m": self.graph.m,
            "girth_target": self.girth_target,
            "girth_achieved": self.girth_achieved,
            "edge_target": self.edge_target,
            "density_shortfall": self.density_shortfall,
            "proposals": self.proposals,
        }


def _hop_within(adj, src, dst, limit):
    """True iff dst is within ``limit`` hops of src."""
    if src == dst:
        return True
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= limit:
            continue
        for w in adj[u]:
            if w not in dist:
                if w == dst:
                    return True
                dist[w] = du + 1
                queue.append(w)
    return False


def generate_high_girth(n, g, seed, budget=None):
    """Randomized greedy graph of girth >= g.

    Non-edges are proposed in seeded random order; a proposal is accepted iff
    its endpoints currently sit at hop distance >= g-1, so every created
    cycle has length >= g.  The report states the achieved edge count against
    the density target n^(1+1/g)/4 (a shortfall is reported, not fatal).
    """
    if n < 3 or g < 3:
        raise ValueError("need n >= 3 and g >= 3")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = rng_stream(seed, 0x9177).permutation(len(pairs))
    if budget is not None:
        order = order[:budget]
    adj = [set() for _ in range(n)]
    edges = []
    for idx in order:
        u, v = pairs[idx]
        if not _hop_within(adj, u, v, g - 2):
            adj[u].add(v)
            adj[v].add(u)
            edges.append((u, v))
    graph = SimpleGraph(n, edges)
    return HighGirthResult(
        graph=graph,
        girth_target=g,
        girth_achieved=girth(graph),
        edge_target=0.25 * n ** (1.0 + 1.0 / g),
        proposals=len(order),
    )


def sample_ensemble(spec):
    """N independent edge subgraphs of the base, subgraph t drawn from the
    stream keyed (seed, t); bit-reproducible for any thread count."""
    base_edges = spec.base.edges
    out = []
    for t in range(spec.N):
        keep = rng_stream(spec.seed, t).random(len(base_edges)) < spec.p
        out.append(SimpleGraph(spec.base.n, [e for e, k in zip(base_edges, keep) if k]))
    return out


def _incident_sets(g):
    inc = [set() for _ in range(g.n)]
    for e in g.edges:
        inc[e[0]].add(e)
        inc[e[1]].add(e)
    return inc


def faraway_pair(g_i, g_j, i=0, j=1, all_witnesses=False):
    """First witness vertex (in index order) with exclusive incident edges in
    both subgraphs, or None; ``all_witnesses`` returns every certificate."""
    if g_i.n != g_j.n:
        raise ValueError("subgraphs must share the vertex set")
    inc_i = _incident_sets(g_i)
    inc_j = _incident_sets(g_j)
    found = []
    for v in range(g_i.n):
        only_i = sorted(inc_i[v] - inc_j[v])
        only_j = sorted(inc_j[v] - inc_i[v])
        if only_i and only_j:
            cert = WitnessCertificate(i, j, v, only_i[0], only_j[0])
            if not all_witnesses:
                return cert
            found.append(cert)
    return found if all_witnesses else None


@dataclass
class EnsembleReport:
    n_subgraphs: int
    n_pairs: int
    faraway_fraction: float
    first_failing_pair: object
    certificates: list
    distance_checks_ok: bool
    distance_check_failures: list = field(default_factory=list)
    union_bound: dict = None
    base_girth: int = None

    def to_dict(self):
        return {
            "n_subgraphs": self.n_subgraphs,
            "n_pairs": self.n_pairs,
            "faraway_fraction": self.faraway_fraction,
            "first_failing_pair": (
                list(self.first_failing_pair) if self.first_failing_pair else None
            ),
            "base_girth": self.base_girth,
            "distance_checks_ok": self.distance_checks_ok,
            "distance_check_failures": self.distance_check_failures,
            "union_bound": self.union_bound,
            "certificates": [
                {
                    "i": c.i,
                    "j": c.j,
                    "v": c.v,
                    "e_i": list(c.e_i),
                    "e_j": list(c.e_j),
                }
                for c in self.certificates
            ],
        }


def _subgraph_hops(g, src):
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[src] = 0
    adj = g.adjacency_lists()
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(int(w))
    return dist


def ensemble_report(ensemble, base_girth, base_edge_count=None, threads=1):
    """Scan all subgraph pairs for witnesses and audit every certificate.

    For a certificate at v, the far endpoint of the edge missing from the
    other subgraph must sit >= base_girth - 1 hops away there (unreachable
    counts as infinitely far).
    """
    N = len(ensemble)
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]

    def scan(rows):
        return [faraway_pair(ensemble[pairs[r][0]], ensemble[pairs[r][1]], *pairs[r])
                for r in rows]

    results = [c for block in map_chunks(scan, split_range(len(pairs), threads * 4), threads)
               for c in block]
    certificates = [c for c in results if c is not None]
    first_fail = None
    for (i, j), cert in zip(pairs, results):
        if cert is None:
            first_fail = (i, j)
            break
    failures = []
    for cert in certificates:
        for graph_idx, other_edge in ((cert.i, cert.e_j), (cert.j, cert.e_i)):
            far = other_edge[1] if other_edge[0] == cert.v else other_edge[0]
            hops = _subgraph_hops(ensemble[graph_idx], cert.v)[far]
            if 0 <= hops < base_girth - 1:
                failures.append(
                    {"i": cert.i, "j": cert.j, "v": cert.v, "graph": graph_idx,
                     "endpoint": int(far), "hops": int(hops)}
                )
    union = None
    if base_edge_count is not None:
        union = union_bound_log(ensemble[0].n, base_edge_count, N).to_dict()
    return EnsembleReport(
        n_subgraphs=N,
        n_pairs=len(pairs),
        faraway_fraction=len(certificates) / len(pairs) if pairs else 0.0,
        first_failing_pair=first_fail,
        certificates=certificates,
        distance_checks_ok=not failures,
        distance_check_failures=failures,
        union_bound=union,
        base_girth=base_girth,
    )


@dataclass
class UnionBoundReport:
    """log2 of C(N,2) * 2^n * (3/4)^m; negative certifies the
    high-probability regime (every pair faraway)."""

    n: int
    m: int
    N: int
    log2_bound: float

    @property
    def ln_bound(self):
        return self.log2_bound * math.log(2.0)

    @property
    def log2_N2_vs_43m_margin(self):
        """Positive iff N^2 << threshold holds: m*log2(4/3) - 2*log2(N)."""
        return self.m * math.log2(4.0 / 3.0) - 2.0 * math.log2(self.N)

    @property
    def within_114_rule(self):
        """Whether N <= 1.14^m, the sufficient ensemble size rule."""
        return math.log(self.N) <= self.m * math.log(1.14)

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "N": self.N,
            "log2_bound": self.log2_bound,
            "ln_bound": self.ln_bound,
            "log2_N2_vs_43m_margin": self.log2_N2_vs_43m_margin,
            "within_114_rule": self.within_114_rule,
        }


def union_bound_log(n, m, N):
    """Exact log-space evaluation of log2[ C(N,2) * 2^n * (3/4)^m ]."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if m < 0 or n < 0:
        raise ValueError("n and m must be nonnegative")
    log2_bound = math.log2(N) + math.log2(N - 1) - 1.0 + n + m * math.log2(0.75)
    return UnionBoundReport(n=n, m=m, N=N, log2_bound=log2_bound)


def subgraph_metric(g, cap=None):
    """Shortest-path metric of a subgraph, capped at n by default."""
    return metric_from_graph(g, g.n if cap is None else cap)


def pigeonhole_relaxation_check(emb, space_i, space_j, cert, g):
    """Shared-anchor relaxation forced on a faraway pair.

    Returns (ok, rel_i, rel_j) where ok means max(rel_i, rel_j) >= g - 1.
    A False result is a counterexample report against the implementation,
    not an error.
    """
    if cert.v not in cert.e_i or cert.v not in cert.e_j:
        raise ValueError("certificate edges must be incident to the witness")
    rel_i = relaxation(space_i, emb, "triplet")
    rel_j = relaxation(space_j, emb, "triplet")
    return max(rel_i, rel_j) >= g - 1, rel_i, rel_j
