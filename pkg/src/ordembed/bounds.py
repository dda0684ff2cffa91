"""Counting certificates: when the number of realizable distance orderings
exceeds the number of sign patterns d-dimensional embeddings can produce, no
embedding in d dimensions can realize every ordering.

All arithmetic runs in log space with compensated summation; the huge counts
are never materialized.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ordembed.constraints import count_triplet_orderings_exact, log_superfactorial

MODES = (
    "triplet",
    "terminal_linear",
    "terminal_sublinear",
    "terminal_no_inter",
    "topk_mixed",
    "topk_unmixed",
)

EXACT_COUNT_LIMIT = 200


def sign_pattern_log_bound(m, l, beta, p=2.0):
    """ln of the sign-pattern count bound for m degree-p polynomials over l
    variables: 4*beta*(8*beta-1)^(l + m/beta - 1) for p=2."""
    if not 1 <= beta <= m:
        raise ValueError("beta must be an integer between 1 and m")
    if l < 1:
        raise ValueError("need at least one variable")
    if p < 2.0:
        raise ValueError("the bound applies for p >= 2")
    exponent = l + m / beta - 1.0
    if p == 2.0:
        return math.log(4.0 * beta) + exponent * math.log(8.0 * beta - 1.0)
    return lp_sign_pattern_log_bound(m, l, beta, p)


def lp_sign_pattern_log_bound(m, l, beta, p):
    """General-norm form 2*beta*p*(4*beta*p-1)^(l + m/beta - 1); at p=2 it
    coincides with :func:`sign_pattern_log_bound` identically."""
    if not 1 <= beta <= m:
        raise ValueError("beta must be an integer between 1 and m")
    exponent = l + m / beta - 1.0
    return math.log(2.0 * beta * p) + exponent * math.log(4.0 * beta * p - 1.0)


class OrderingsLog(NamedTuple):
    log_value: float
    method: str  # "exact-closed-form" or "superfactorial"


def triplet_orderings_log(n):
    """ln of the shared-anchor ordering count: the exact closed-form product
    for n <= 200, the superfactorial lower bound beyond."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if n <= EXACT_COUNT_LIMIT:
        return OrderingsLog(math.log(count_triplet_orderings_exact(n)), "exact-closed-form")
    return OrderingsLog(log_superfactorial(n), "superfactorial")


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of a certificate run.

    k may be given directly or derived from lam (k = lam*n) or from
    (lam, beta_exp) (k = lam * n^(1-beta_exp)).  beta_grid defaults to the
    powers of two up to m joined with round(mu * n^x) for mu in mu_grid,
    x in x_grid.
    """

    mode: str
    n: int
    k: int = None
    lam: float = None
    beta_exp: float = None
    d_range: object = None
    beta_grid: tuple = None
    p: float = 2.0
    mu_grid: tuple = (1, 10, 100, 1000)
    x_grid: tuple = (1, 2)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n < 3:
            raise ValueError("n must be >= 3")

    def resolved_k(self):
        if self.mode == "triplet":
            return None
        if self.k is not None:
            k = int(self.k)
        elif self.mode == "terminal_sublinear" or (self.lam is not None and self.beta_exp is not None):
            lam = 1.0 if self.lam is None else self.lam
            bexp = 0.5 if self.beta_exp is None else self.beta_exp
            k = round(lam * self.n ** (1.0 - bexp))
        elif self.lam is not None:
            k = round(self.lam * self.n)
        else:
            raise ValueError(f"mode {self.mode} needs k, lam, or (lam, beta_exp)")
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"k={k} outside [1, n-1]")
        return k


def _default_beta_grid(n, m, mu_grid, x_grid):
    grid = set()
    b = 1
    while b <= m:
        grid.add(b)
        b *= 2
    grid.add(int(m))
    for mu in mu_grid:
        for x in x_grid:
            v = round(mu * n ** x)
            if 1 <= v <= m:
                grid.add(v)
    return tuple(sorted(grid))


def _mode_counts(mode, n, k):
    """(log_orderings, method_tag, m_comparisons, distinct_distances)."""
    if mode == "triplet":
        log_ord, method = triplet_orderings_log(n)
        m = n * ((n - 1) * (n - 2) // 2)
        return log_ord, method, m, None
    if mode in ("terminal_linear", "terminal_sublinear", "terminal_no_inter"):
        slots = k * n - k * (k + 1) // 2  # sum_{i=1..k} (n - i), exact
        m = slots * (slots - 1) // 2
        if mode == "terminal_no_inter":
            log_ord = math.fsum(math.lgamma(n - i + 1) for i in range(1, k + 1))
            return log_ord, "product-of-factorials", m, slots
        return math.lgamma(slots + 1), "factorial", m, slots
    slots = n * k
    m = slots * (slots - 1) // 2
    if mode == "topk_mixed":
        distinct = n * k - k * k  # overlap correction for the shared pairs
        return math.lgamma(distinct + 1), "factorial", m, distinct
    return n * math.lgamma(k + 1), "per-anchor-factorials", m, slots


_ASYMPTOTE_NOTES = {
    "triplet": "d > n/(2+eps) asymptotically",
    "terminal_linear": "d > k*(1 - k/(2n)) asymptotically",
    "terminal_no_inter": "d > k*(1 - k/(2n)) asymptotically (inter-terminal pairs ignored)",
    "terminal_sublinear": "d > k/c for any c > 1 asymptotically",
    "topk_mixed": "d = Omega(k) asymptotically",
    "topk_unmixed": "d = Omega(k log k / log n) asymptotically",
}


def _asymptotic_threshold(mode, n, k):
    if mode == "triplet":
        return n / 2.0
    if mode in ("terminal_linear", "terminal_no_inter"):
        return k * (1.0 - k / (2.0 * n))
    if mode == "terminal_sublinear":
        return float(k)
    if mode == "topk_mixed":
        return float(k)
    return k * math.log(max(k, 2)) / math.log(n)


@dataclass
class BoundReport:
    mode: str
    n: int
    k: int
    m_comparisons: int
    orderings_log: float
    orderings_method: str
    certified_d: int
    asymptotic_threshold: float
    asymptote_note: str
    beta_grid_size: int
    table: list = field(default_factory=list)

    def to_dict(self):
        return {
            "mode": self.mode,
            "n": self.n,
            "k": self.k,
            "m_comparisons": self.m_comparisons,
            "orderings_log": self.orderings_log,
            "orderings_method": self.orderings_method,
            "certified_d": self.certified_d,
            "asymptotic_threshold": self.asymptotic_threshold,
            "asymptote_note": self.asymptote_note,
            "beta_grid_size": self.beta_grid_size,
            "table": self.table,
        }


def certify_lower_bound(query, table_limit=64):
    """Largest d such that the ordering count exceeds the minimized
    sign-pattern bound for every d' <= d (0 when even d=1 fails).

    The per-d table is truncated to ``table_limit`` rows around the
    certificate boundary; pass None to keep all rows.
    """
    n = query.n
    k = query.resolved_k()
    log_ord, method, m, _ = _mode_counts(query.mode, n, k)
    grid = query.beta_grid or _default_beta_grid(n, m, query.mu_grid, query.x_grid)
    if not grid:
        raise ValueError("empty beta grid")
    if any(not 1 <= b <= m for b in grid):
        raise ValueError("beta grid values must lie in [1, m]")
    d_values = np.asarray(
        sorted(set(query.d_range)) if query.d_range is not None else range(1, n),
        dtype=np.int64,
    )
    if d_values.size == 0 or d_values[0] < 1 or d_values[-1] >= n:
        raise ValueError("d_range must be a nonempty subset of [1, n)")
    betas = np.asarray(grid, dtype=np.float64)
    if query.p == 2.0:
        const = np.log(4.0 * betas)
        base = np.log(8.0 * betas - 1.0)
    else:
        const = np.log(2.0 * betas * query.p)
        base = np.log(4.0 * betas * query.p - 1.0)
    exponent = n * d_values[:, None] + (float(m) / betas)[None, :] - 1.0
    bounds = const[None, :] + exponent * base[None, :]
    best_idx = bounds.argmin(axis=1)
    best_bound = bounds[np.arange(d_values.size), best_idx]
    passing = log_ord > best_bound
    certified = 0
    for i, d in enumerate(d_values):
        if passing[i]:
            certified = int(d)
        else:
            break
    rows = [
        {
            "d": int(d),
            "log_orderings": float(log_ord),
            "best_beta": int(grid[best_idx[i]]),
            "log_sign_bound": float(best_bound[i]),
            "certified": bool(passing[i]),
        }
        for i, d in enumerate(d_values)
    ]
    if table_limit is not None and len(rows) > table_limit:
        keep = table_limit // 2
        lo = max(0, min(certified - keep, len(rows) - table_limit))
        rows = rows[lo:lo + table_limit]
    return BoundReport(
        mode=query.mode,
        n=n,
        k=k,
        m_comparisons=int(m),
        orderings_log=float(log_ord),
        orderings_method=method,
        certified_d=certified,
        asymptotic_threshold=_asymptotic_threshold(query.mode, n, k),
        asymptote_note=_ASYMPTOTE_NOTES[query.mode],
        beta_grid_size=len(grid),
        table=rows,
    )


def relaxation_floor(n, d, c=8.0):
    """The forced relaxation log(n)/(log(d) + log(log(n)) + c) - 1, reported
    in both base-2 and natural logs (the base is not pinned down)."""
    if n < 3 or d < 1:
        raise ValueError("need n >= 3 and d >= 1")
    base2 = math.log2(n) / (math.log2(max(d, 1)) + math.log2(math.log2(n)) + c) - 1.0
    natural = math.log(n) / (math.log(max(d, 1)) + math.log(math.log(n)) + c) - 1.0
    return {"c": c, "base2": base2, "natural": natural}
