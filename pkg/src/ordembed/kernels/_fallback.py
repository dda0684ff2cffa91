"""Numpy/pure-Python implementations of the hot kernels.

These mirror the compiled extension in ``_native.pyx`` exactly; the package
selects one of the two at import time (see ``kernels/__init__.py``).
"""

from collections import deque

import numpy as np

_PERM_CHUNK = 300_000


def bfs_from_sources(n, indptr, indices, sources):
    """Hop distances from each source vertex; -1 marks unreachable vertices.

    The graph is given in CSR form (indptr/indices over 0..n-1).
    Returns an int32 array of shape (len(sources), n).
    """
    out = np.empty((len(sources), n), dtype=np.int32)
    adj = [indices[indptr[v]:indptr[v + 1]] for v in range(n)]
    for row, s in enumerate(sources):
        dist = out[row]
        dist.fill(-1)
        dist[s] = 0
        queue = deque([int(s)])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = du
                    queue.append(int(w))
    return out


def _permutation_block(n_slots):
    """All permutations of range(n_slots) as an (n_slots!, n_slots) int8 array."""
    out = np.zeros((1, 1), dtype=np.int8)
    for size in range(2, n_slots + 1):
        sub = out
        blocks = []
        for first in range(size):
            remap = np.concatenate(
                [np.arange(first, dtype=np.int8), np.arange(first + 1, size, dtype=np.int8)]
            )
            blk = np.empty((sub.shape[0], size), dtype=np.int8)
            blk[:, 0] = first
            blk[:, 1:] = remap[sub]
            blocks.append(blk)
        out = np.vstack(blocks)
    return out


def order_projection_patterns(n_slots, left, right):
    """Project every total order of ``n_slots`` items onto comparison bits.

    For each permutation of the slots (read as "slot at position 0 is the
    smallest value, ..."), bit k of the output word records whether slot
    left[k] precedes slot right[k].  Returns one uint64 per permutation;
    callers count distinct patterns via ``np.unique``.
    """
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if left.size > 63:
        raise ValueError("at most 63 comparisons fit into the packed pattern word")
    if n_slots > 11:
        raise ValueError("permutation enumeration is infeasible beyond 11 slots")
    weights = np.uint64(1) << np.arange(left.size, dtype=np.uint64)
    perms = _permutation_block(n_slots)
    chunks = []
    for lo in range(0, perms.shape[0], _PERM_CHUNK):
        chunk = perms[lo:lo + _PERM_CHUNK]
        inv = np.argsort(chunk, axis=1).astype(np.int8)
        bits = (inv[:, left] < inv[:, right]).astype(np.uint64)
        chunks.append(bits @ weights)
    return np.concatenate(chunks)


def hinge_loss_grad(coords, comps, margin):
    """Squared-distance hinge loss and its gradient.

    One term per comparison row (a, b, c, d):
        max(0, margin + ||x_a - x_b||^2 - ||x_c - x_d||^2)
    """
    a, b, c, d = comps[:, 0], comps[:, 1], comps[:, 2], comps[:, 3]
    dab = coords[a] - coords[b]
    dcd = coords[c] - coords[d]
    slack = margin + np.einsum("ij,ij->i", dab, dab) - np.einsum("ij,ij->i", dcd, dcd)
    active = slack > 0.0
    loss = float(slack[active].sum())
    grad = np.zeros_like(coords)
    if active.any():
        gab = 2.0 * dab[active]
        gcd = 2.0 * dcd[active]
        np.add.at(grad, a[active], gab)
        np.add.at(grad, b[active], -gab)
        np.add.at(grad, c[active], -gcd)
        np.add.at(grad, d[active], gcd)
    return loss, grad
