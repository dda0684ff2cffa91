# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see _fallback.py for the contract)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def bfs_from_sources(int n, cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices,
                     cnp.int32_t[::1] sources):
    out = np.empty((sources.shape[0], n), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = out
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t row, i
    cdef int s, u, w, du, head, tail
    with nogil:
        for row in range(sources.shape[0]):
            s = sources[row]
            for i in range(n):
                dist[row, i] = -1
            dist[row, s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[row, u] + 1
                for i in range(indptr[u], indptr[u + 1]):
                    w = indices[i]
                    if dist[row, w] < 0:
                        dist[row, w] = du
                        queue[tail] = w
                        tail += 1
    return out


def order_projection_patterns(int n_slots, cnp.int32_t[::1] left, cnp.int32_t[::1] right):
    cdef Py_ssize_t n_comp = left.shape[0]
    if n_comp > 63:
        raise ValueError("at most 63 comparisons fit into the packed pattern word")
    if n_slots > 11:
        raise ValueError("permutation enumeration is infeasible beyond 11 slots")
    cdef unsigned long long total = 1
    cdef int i
    for i in range(2, n_slots + 1):
        total *= i
    out = np.empty(total, dtype=np.uint64)
    cdef cnp.uint64_t[::1] pats = out
    perm_arr = np.arange(n_slots, dtype=np.int32)
    inv_arr = np.arange(n_slots, dtype=np.int32)
    ctr_arr = np.zeros(n_slots, dtype=np.int32)
    cdef cnp.int32_t[::1] perm = perm_arr
    cdef cnp.int32_t[::1] inv = inv_arr
    cdef cnp.int32_t[::1] ctr = ctr_arr
    cdef unsigned long long idx = 0
    cdef cnp.uint64_t pat
    cdef Py_ssize_t k
    cdef int depth, swap_pos, tmp
    with nogil:
        while True:
            # pattern of the current permutation
            pat = 0
            for k in range(n_comp):
                if inv[left[k]] < inv[right[k]]:
                    pat |= (<cnp.uint64_t>1) << k
            pats[idx] = pat
            idx += 1
            # advance with Heap's algorithm, keeping the inverse in sync
            depth = 1
            while depth < n_slots:
                if ctr[depth] < depth:
                    swap_pos = ctr[depth] if depth % 2 == 1 else 0
                    tmp = perm[swap_pos]
                    perm[swap_pos] = perm[depth]
                    perm[depth] = tmp
                    inv[perm[swap_pos]] = swap_pos
                    inv[perm[depth]] = depth
                    ctr[depth] += 1
                    break
                ctr[depth] = 0
                depth += 1
            if depth == n_slots:
                break
    return out


def hinge_loss_grad(cnp.float64_t[:, ::1] coords, cnp.int32_t[:, ::1] comps, double margin):
    cdef Py_ssize_t m = comps.shape[0]
    cdef Py_ssize_t dim = coords.shape[1]
    grad_arr = np.zeros((coords.shape[0], dim), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] grad = grad_arr
    cdef double loss = 0.0
    cdef double lhs, rhs, diff, slack, g
    cdef Py_ssize_t r, j
    cdef int a, b, c, d
    with nogil:
        for r in range(m):
            a = comps[r, 0]
            b = comps[r, 1]
            c = comps[r, 2]
            d = comps[r, 3]
            lhs = 0.0
            rhs = 0.0
            for j in range(dim):
                diff = coords[a, j] - coords[b, j]
                lhs += diff * diff
                diff = coords[c, j] - coords[d, j]
                rhs += diff * diff
            slack = margin + lhs - rhs
            if slack > 0.0:
                loss += slack
                for j in range(dim):
                    g = 2.0 * (coords[a, j] - coords[b, j])
                    grad[a, j] += g
                    grad[b, j] -= g
                    g = 2.0 * (coords[c, j] - coords[d, j])
                    grad[c, j] -= g
                    grad[d, j] += g
    return loss, grad_arr
