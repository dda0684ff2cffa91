"""Comparison families extracted from a metric space, and ordering counts.

A comparison row (a, b, c, d) asserts delta(a,b) < delta(c,d).  Family layout:

* ``triplet`` / ``topk_unmixed``: shared anchor, a == c.
* ``terminal``: a and c are terminals, b and d are not.
* ``topk_mixed``: b is among a's k nearest neighbors, d among c's.
* ``full``: both pairs stored sorted (a < b, c < d).

Extractors emit rows in lexicographic (a, b, c, d) order, so equal inputs
give byte-identical constraint files.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ordembed import kernels
from ordembed._util import rng_stream

FAMILIES = ("triplet", "terminal", "topk_mixed", "topk_unmixed", "full")


class TieError(ValueError):
    """Exact distance tie under the 'error' policy; the message names it."""


@dataclass(frozen=True)
class Comparison:
    """Single ordered distance comparison: delta(a,b) < delta(c,d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a == self.b or self.c == self.d:
            raise ValueError("a pair must have two distinct points")
        if {self.a, self.b} == {self.c, self.d}:
            raise ValueError("the two pairs must differ")

    def as_row(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class ConstraintSet:
    family: str
    comparisons: np.ndarray
    terminals: frozenset = None
    k: int = field(default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        comps = np.asarray(self.comparisons, dtype=np.int64).reshape(-1, 4)
        comps.flags.writeable = False
        object.__setattr__(self, "comparisons", comps)
        a, b, c, d = comps.T
        if comps.size:
            if comps.min() < 0:
                raise ValueError("negative point index")
            if np.any(a == b) or np.any(c == d):
                raise ValueError("degenerate pair in comparison")
            same = (np.minimum(a, b) == np.minimum(c, d)) & (np.maximum(a, b) == np.maximum(c, d))
            if np.any(same):
                raise ValueError("comparison relates a pair to itself")
        if self.family in ("triplet", "topk_unmixed") and np.any(a != c):
            raise ValueError(f"{self.family} comparisons must share the anchor (a == c)")
        if self.family == "terminal":
            if self.terminals is None:
                raise ValueError("terminal family needs the terminal set")
            t = np.fromiter(self.terminals, dtype=np.int64)
            in_t = np.zeros(int(max(comps.max(initial=0), t.max(initial=0))) + 1, dtype=bool)
            in_t[t] = True
            if comps.size and not (in_t[a].all() and in_t[c].all()):
                raise ValueError("terminal comparisons must anchor at terminals")
            if comps.size and (in_t[b].any() or in_t[d].any()):
                raise ValueError("terminal comparisons must point at non-terminals")
        if self.family in ("topk_mixed", "topk_unmixed") and not self.k:
            raise ValueError("top-k family needs k")

    def __len__(self):
        return self.comparisons.shape[0]

    @property
    def max_index(self):
        return int(self.comparisons.max()) if len(self) else -1

    def rows(self):
        for a, b, c, d in self.comparisons:
            yield Comparison(int(a), int(b), int(c), int(d))


def _lexsorted(rows):
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
    if rows.shape[0] > 1:
        order = np.lexsort((rows[:, 3], rows[:, 2], rows[:, 1], rows[:, 0]))
        rows = rows[order]
    return rows


def _orient(first, second, less, greater, tie_policy, tie_label):
    """Stack oriented rows (smaller distance first); handle exact ties."""
    ties = ~(less | greater)
    if np.any(ties):
        if tie_policy == "error":
            i = int(np.flatnonzero(ties)[0])
            raise TieError(
                f"distance tie between pairs {tuple(first[i])} and {tuple(second[i])}"
                + (f" ({tie_label})" if tie_label else "")
            )
        if tie_policy != "skip":
            raise ValueError(f"unknown tie policy {tie_policy!r}")
    fwd = np.hstack([first[less], second[less]])
    bwd = np.hstack([second[greater], first[greater]])
    return np.vstack([fwd, bwd])


def extract_triplets(space, tie_policy="skip"):
    """All shared-anchor comparisons delta(x,y) < delta(x,z).

    Exact ties emit nothing under 'skip' and abort under 'error'.  A tie-free
    metric yields exactly n * C(n-1, 2) comparisons.
    """
    n = space.n
    d = space.dist
    blocks = []
    for x in range(n):
        others = np.concatenate([np.arange(x), np.arange(x + 1, n)])
        iy, iz = np.triu_indices(n - 1, 1)
        y, z = others[iy], others[iz]
        dy, dz = d[x, y], d[x, z]
        first = np.column_stack([np.full(y.shape, x), y])
        second = np.column_stack([np.full(z.shape, x), z])
        blocks.append(_orient(first, second, dy < dz, dy > dz, tie_policy, f"anchor {x}"))
    return ConstraintSet("triplet", _lexsorted(np.vstack(blocks)))


def extract_terminal(space, terminals, tie_policy="error"):
    """Comparisons over all terminal-to-nonterminal distances (t == t' included)."""
    n = space.n
    T = sorted(set(int(t) for t in terminals))
    if not T:
        raise ValueError("terminal set is empty")
    if any(t < 0 or t >= n for t in T):
        raise ValueError("terminal index out of range")
    if len(T) >= n:
        raise ValueError("T must be a strict subset of the points")
    V = np.asarray([v for v in range(n) if v not in set(T)])
    Tarr = np.asarray(T)
    t_idx = np.repeat(Tarr, len(V))
    v_idx = np.tile(V, len(Tarr))
    slots = np.column_stack([t_idx, v_idx])
    vals = space.dist[t_idx, v_idx]
    i, j = np.triu_indices(len(slots), 1)
    first, second = slots[i], slots[j]
    less, greater = vals[i] < vals[j], vals[i] > vals[j]
    rows = _orient(first, second, less, greater, tie_policy, "terminal distances")
    return ConstraintSet("terminal", _lexsorted(rows), terminals=frozenset(T))


def nearest_neighbor_sets(space, k):
    """The k nearest neighbors of every point; boundary ties are a hard error
    because they make the neighbor set ambiguous (jitter the metric to break
    them)."""
    n = space.n
    if not 1 <= k <= n - 1:
        raise ValueError("k must be in [1, n-1]")
    nn = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        order = np.argsort(space.dist[i], kind="stable")
        order = order[order != i]
        if k < n - 1 and space.dist[i, order[k - 1]] == space.dist[i, order[k]]:
            raise TieError(
                f"point {i}: tie between neighbors {int(order[k - 1])} and {int(order[k])} "
                f"at the k={k} boundary"
            )
        nn[i] = order[:k]
    return nn


def extract_topk(space, k, mixed, tie_policy="skip"):
    """Comparisons among each point's k-nearest-neighbor distances.

    mixed=False compares only distances sharing the anchor; mixed=True
    compares any two distinct (point, neighbor) pairs.
    """
    nn = nearest_neighbor_sets(space, k)
    d = space.dist
    n = space.n
    if not mixed:
        blocks = []
        iy, iz = np.triu_indices(k, 1)
        for x in range(n):
            y, z = nn[x, iy], nn[x, iz]
            dy, dz = d[x, y], d[x, z]
            first = np.column_stack([np.full(y.shape, x), y])
            second = np.column_stack([np.full(z.shape, x), z])
            blocks.append(_orient(first, second, dy < dz, dy > dz, tie_policy, f"anchor {x}"))
        return ConstraintSet("topk_unmixed", _lexsorted(np.vstack(blocks)), k=k)
    # mixed: deduplicate unordered pairs, keeping a (anchor, neighbor) layout
    members = {}
    for x in range(n):
        for y in nn[x]:
            members.setdefault((min(x, int(y)), max(x, int(y))), set()).add(x)
    slots = []
    for (u, v) in sorted(members):
        anchors = members[(u, v)]
        slots.append((u, v) if u in anchors else (v, u))
    slots = np.asarray(slots, dtype=np.int64)
    vals = d[slots[:, 0], slots[:, 1]]
    i, j = np.triu_indices(len(slots), 1)
    rows = _orient(slots[i], slots[j], vals[i] < vals[j], vals[i] > vals[j], tie_policy, "top-k")
    return ConstraintSet("topk_mixed", _lexsorted(rows), k=k)


def extract_full(space, tie_policy="skip"):
    """Every comparison between two distinct unordered pairs."""
    n = space.n
    iu = np.triu_indices(n, 1)
    slots = np.column_stack(iu)
    vals = space.dist[iu]
    i, j = np.triu_indices(len(slots), 1)
    rows = _orient(slots[i], slots[j], vals[i] < vals[j], vals[i] > vals[j], tie_policy, "full")
    return ConstraintSet("full", _lexsorted(rows))


def extract_family(space, family, terminals=None, k=None, mixed=None, tie_policy=None):
    """Dispatch by family tag with each extractor's default tie policy."""
    if family == "triplet":
        return extract_triplets(space, tie_policy or "skip")
    if family == "terminal":
        if terminals is None:
            raise ValueError("terminal family needs terminals")
        return extract_terminal(space, terminals, tie_policy or "error")
    if family in ("topk_mixed", "topk_unmixed"):
        if k is None:
            raise ValueError("top-k family needs k")
        return extract_topk(space, k, family == "topk_mixed", tie_policy or "skip")
    if family == "full":
        return extract_full(space, tie_policy or "skip")
    raise ValueError(f"unknown family {family!r}")


def jitter_metric(space, eps, seed):
    """Deterministic multiplicative perturbation that breaks exact ties.

    Distances within a relative ``eps`` of each other may change order; the
    result is for order extraction and may miss the triangle inequality by
    O(eps)."""
    from ordembed.metric import FiniteMetricSpace

    if not eps > 0:
        raise ValueError("eps must be positive")
    rng = rng_stream(seed, 0x6A17)
    n = space.n
    noise = rng.random((n, n))
    noise = np.triu(noise, 1)
    noise = noise + noise.T
    d = space.dist * (1.0 + eps * noise)
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(n, d)


# -- ordering counts ---------------------------------------------------------

def count_triplet_orderings_exact(n):
    """Exact integer value of the closed-form product
    (n-1)!/0! * n!/2! * (n+1)!/4! * ... * (2n-3)!/(2n-4)!.

    Note: this closed form is NOT the number of distinct anchor-wise
    projections of total distance orders; see
    :func:`triplet_projection_oracle`, which counts those directly.  Both
    numbers are exposed and reported side by side, never silently merged.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    value = 1
    for i in range(n - 1):
        value *= math.factorial(n - 1 + i) // math.factorial(2 * i)
    return value


def triplet_projection_oracle(n):
    """Brute-force count of distinct triplet orderings on n points.

    Enumerates all C(n,2)! total orders of the pairwise distances and counts
    the distinct projections onto shared-anchor comparisons.  Feasible for
    n <= 5 (10! orders).
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if n > 5:
        raise ValueError("projection oracle is infeasible beyond n=5")
    pair_index = {}
    for u in range(n):
        for v in range(u + 1, n):
            pair_index[(u, v)] = len(pair_index)
    left, right = [], []
    for x in range(n):
        others = [y for y in range(n) if y != x]
        for a in range(len(others)):
            for b in range(a + 1, len(others)):
                y, z = others[a], others[b]
                left.append(pair_index[tuple(sorted((x, y)))])
                right.append(pair_index[tuple(sorted((x, z)))])
    pats = kernels.order_projection_patterns(
        len(pair_index),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
    )
    return int(np.unique(pats).size)


def log_superfactorial(n):
    """ln(0! * 1! * ... * (n-1)!) by compensated summation of ln terms."""
    if n < 1:
        raise ValueError("n must be >= 1")
    # sum_{i=1}^{n-1} ln(i!) = sum_{j=2}^{n-1} (n - j) ln j
    return math.fsum((n - j) * math.log(j) for j in range(2, n))
