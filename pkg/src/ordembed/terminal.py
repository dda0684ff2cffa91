"""Exact order-preserving embedding for a terminal subset.

Terminals are placed at -M * e_i; every other point gets the vector of its
distance ranks to the terminals.  With M at least k^3 * n^2 the cross term
2 * rank * M + M^2 dominates the rank-vector norms, so embedded squared
distances are ordered exactly like the ranks.  All entries are integers, so
the construction can be audited in exact integer arithmetic.
"""

import math
from dataclasses import dataclass

import numpy as np

from ordembed.constraints import TieError
from ordembed.verify import Embedding

_INT64_GUARD = 2 ** 62


@dataclass(frozen=True)
class RankTable:
    """Bijection from terminal/non-terminal pairs onto 1..k*(n-k), ascending
    in source distance."""

    terminals: tuple
    nonterminals: tuple
    ranks: np.ndarray  # shape (k, n-k); ranks[ti, vi] is the rank of (t, v)

    def __post_init__(self):
        r = np.asarray(self.ranks, dtype=np.int64)
        k, nk = len(self.terminals), len(self.nonterminals)
        if r.shape != (k, nk):
            raise ValueError("rank matrix shape mismatch")
        flat = np.sort(r.ravel())
        if not np.array_equal(flat, np.arange(1, k * nk + 1)):
            raise ValueError("ranks must be a bijection onto 1..k(n-k)")
        r.flags.writeable = False
        object.__setattr__(self, "ranks", r)

    @property
    def k(self):
        return len(self.terminals)

    def rank(self, t, v):
        ti = self.terminals.index(t)
        vi = self.nonterminals.index(v)
        return int(self.ranks[ti, vi])

    def as_dict(self):
        return {
            (t, v): int(self.ranks[ti, vi])
            for ti, t in enumerate(self.terminals)
            for vi, v in enumerate(self.nonterminals)
        }


@dataclass(frozen=True)
class TerminalEmbedding:
    emb: Embedding
    M: int
    table: RankTable
    norm_p: float = 2.0


def rank_table(space, terminals, tie_break="error"):
    """Rank every terminal-to-nonterminal distance, ascending.

    Equal distances abort under 'error' (naming both pairs) or are resolved
    by the (t, v) index pair under 'lexicographic'.
    """
    n = space.n
    T = sorted(set(int(t) for t in terminals))
    if not 1 <= len(T) < n:
        raise ValueError("need 1 <= |T| < n")
    if T[0] < 0 or T[-1] >= n:
        raise ValueError("terminal index out of range")
    V = [v for v in range(n) if v not in set(T)]
    t_idx = np.repeat(np.arange(len(T)), len(V))
    v_idx = np.tile(np.arange(len(V)), len(T))
    dvals = space.dist[np.asarray(T)[t_idx], np.asarray(V)[v_idx]]
    if tie_break == "error":
        order = np.lexsort((v_idx, t_idx, dvals))
        sd = dvals[order]
        dup = np.flatnonzero(sd[1:] == sd[:-1])
        if dup.size:
            i = int(dup[0])
            p1 = (T[t_idx[order[i]]], V[v_idx[order[i]]])
            p2 = (T[t_idx[order[i + 1]]], V[v_idx[order[i + 1]]])
            raise TieError(f"equal terminal distances for pairs {p1} and {p2}")
    elif tie_break == "lexicographic":
        order = np.lexsort((v_idx, t_idx, dvals))
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    ranks = np.empty((len(T), len(V)), dtype=np.int64)
    ranks[t_idx[order], v_idx[order]] = np.arange(1, len(order) + 1)
    return RankTable(tuple(T), tuple(V), ranks)


def default_offset(n, k, norm_p=2.0):
    """Smallest offset M the construction accepts for the given norm."""
    if norm_p == 2.0:
        return k ** 3 * n ** 2
    return math.ceil(k * (k * n) ** norm_p)


def embed_terminals(space, terminals, M=None, tie_break="error", norm_p=2.0):
    """Build the k-dimensional terminal embedding of ``space``.

    M defaults to k^3 * n^2 (for p=2); smaller values are rejected because
    the rank-vector norms could then override the rank order.
    """
    if norm_p < 2.0:
        raise ValueError("the construction requires p >= 2")
    table = rank_table(space, terminals, tie_break)
    n = space.n
    k = table.k
    floor = default_offset(n, k, norm_p)
    if M is None:
        M = floor
    if M < floor:
        raise ValueError(f"M={M} is below the dominance floor {floor}")
    if norm_p == 2.0 and int(M) != M:
        raise ValueError("M must be an integer for the p=2 construction")
    coords = np.zeros((n, k))
    for ti, t in enumerate(table.terminals):
        coords[t, ti] = -float(M)
    for vi, v in enumerate(table.nonterminals):
        coords[v] = table.ranks[:, vi].astype(np.float64)
    emb = Embedding(n, k, coords)
    return TerminalEmbedding(emb, int(M) if norm_p == 2.0 else M, table, norm_p)


@dataclass
class DominanceReport:
    """Exact integer audit of the embedding's squared terminal distances."""

    n_checked: int
    identity_mismatches: list
    c_max: int
    c_bound: int
    rank_order_ok: bool

    @property
    def ok(self):
        return not self.identity_mismatches and self.c_max <= self.c_bound and self.rank_order_ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "n_checked": self.n_checked,
            "identity_mismatches": self.identity_mismatches,
            "c_max": self.c_max,
            "c_bound": self.c_bound,
            "rank_order_ok": self.rank_order_ok,
        }


def dominance_check(te, space, terminals):
    """Verify, in exact integers, that every squared terminal distance equals
    C(v) + 2*r(t,v)*M + M^2 with C(v) <= k^3*n^2, and that squared distances
    are ordered exactly like the ranks."""
    if te.norm_p != 2.0:
        raise ValueError("the integer audit applies to the p=2 construction")
    table = te.table
    if tuple(sorted(set(int(t) for t in terminals))) != table.terminals:
        raise ValueError("terminal set does not match the embedding")
    n = space.n
    k = table.k
    M = int(te.M)
    # exact int64 when safe, arbitrary-precision Python ints otherwise
    big = (M + n * k) ** 2 + k * (n * k) ** 2 >= _INT64_GUARD
    ranks = table.ranks.astype(object) if big else table.ranks
    c_of_v = (ranks ** 2).sum(axis=0)
    mismatches = []
    # squared distance recomputed from the integer coordinate rows
    int_coords = np.zeros((n, k), dtype=object if big else np.int64)
    for ti, t in enumerate(table.terminals):
        int_coords[t, ti] = -M
    for vi, v in enumerate(table.nonterminals):
        int_coords[v] = ranks[:, vi]
    sq_pairs = np.empty((k, len(table.nonterminals)), dtype=object if big else np.int64)
    for ti, t in enumerate(table.terminals):
        diff = int_coords[list(table.nonterminals)] - int_coords[t]
        sq_pairs[ti] = (diff * diff).sum(axis=1)
        expected = c_of_v + 2 * ranks[ti] * M + M * M
        for vi in np.flatnonzero(sq_pairs[ti] != expected):
            mismatches.append(
                {
                    "t": int(t),
                    "v": int(table.nonterminals[vi]),
                    "squared_distance": int(sq_pairs[ti, vi]),
                    "expected": int(expected[vi]),
                }
            )
    order = np.argsort(table.ranks.ravel())
    sorted_sq = sq_pairs.ravel()[order]
    rank_order_ok = all(x < y for x, y in zip(sorted_sq, sorted_sq[1:]))
    return DominanceReport(
        n_checked=int(ranks.size),
        identity_mismatches=mismatches,
        c_max=int(max(c_of_v)),
        c_bound=k ** 3 * n ** 2,
        rank_order_ok=rank_order_ok,
    )
