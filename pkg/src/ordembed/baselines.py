"""Baseline embedders: subset-distance coordinates plus Gaussian projection
for upper-bound probing, and a hinge-loss gradient fitter for small-n
dimension searches."""

import math
from dataclasses import dataclass

import numpy as np

from ordembed import kernels
from ordembed._util import map_chunks, rng_stream
from ordembed.verify import Embedding, check_constraints, pairwise_distances


def bourgain_embed(space, reps_per_scale=24, seed=0):
    """Distance-to-random-subset coordinates.

    One coordinate per (scale s in 1..ceil(log2 n), repetition); the subset
    at scale s has size min(2^(s-1), n) so the smallest scale always uses
    singletons.  Each raw coordinate is 1-Lipschitz in the source metric;
    coordinates are scaled by 1/(number of coordinates).
    """
    if space.n < 2:
        raise ValueError("need at least two points")
    if reps_per_scale < 1:
        raise ValueError("reps_per_scale must be >= 1")
    n = space.n
    n_scales = max(1, math.ceil(math.log2(n)))
    n_coords = n_scales * reps_per_scale
    coords = np.empty((n, n_coords))
    col = 0
    for s in range(1, n_scales + 1):
        size = min(2 ** (s - 1), n)
        for t in range(reps_per_scale):
            subset = rng_stream(seed, s, t).choice(n, size=size, replace=False)
            coords[:, col] = space.dist[:, subset].min(axis=1)
            col += 1
    coords /= n_coords
    return Embedding(n, n_coords, coords)


def jl_project(emb, d_out, seed=0):
    """Multiply by a d_out x d matrix of standard Gaussians scaled 1/sqrt(d_out),
    which preserves squared distances in expectation."""
    if d_out < 1:
        raise ValueError("d_out must be >= 1")
    proj = rng_stream(seed, 0x31).standard_normal((d_out, emb.d)) / math.sqrt(d_out)
    return Embedding(emb.n, d_out, emb.coords @ proj.T)


@dataclass(frozen=True)
class FitConfig:
    d: int
    margin: float = None  # None: 1e-3 of the median squared distance, annealed once
    step: float = 0.05
    iters: int = 600
    restarts: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.iters < 1 or self.restarts < 1 or self.step <= 0:
            raise ValueError("d, iters, restarts must be >= 1 and step > 0")
        if self.margin is not None and self.margin < 0:
            raise ValueError("margin must be >= 0")


@dataclass
class FitResult:
    embedding: Embedding
    loss: float
    restart: int
    margin: float
    violations: int

    @property
    def satisfied(self):
        """Zero loss under a positive margin certifies zero violations, i.e.
        the instance embeds in this dimension (a one-sided certificate);
        failure proves nothing."""
        return self.loss == 0.0 and self.margin > 0.0


def _median_sq_dist(coords):
    d = pairwise_distances(coords)
    iu = np.triu_indices(coords.shape[0], 1)
    vals = d[iu] ** 2
    return float(np.median(vals)) if vals.size else 1.0


def _descend(coords, comps, margin, step, iters):
    """Backtracking gradient descent; loss is non-increasing per accepted step."""
    loss, grad = kernels.hinge_loss_grad(coords, comps, margin)
    for _ in range(iters):
        if loss == 0.0:
            break
        accepted = False
        for _ in range(40):
            cand = coords - step * grad
            cand_loss, cand_grad = kernels.hinge_loss_grad(cand, comps, margin)
            if cand_loss <= loss:
                coords, loss, grad = cand, cand_loss, cand_grad
                step *= 1.25
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    return coords, loss, step


def _fit_one(space, comps, cfg, restart):
    rng = rng_stream(cfg.seed, restart)
    coords = rng.standard_normal((space.n, cfg.d))
    if comps.shape[0] == 0:
        return coords, 0.0, 0.0
    if cfg.margin is not None:
        margin = cfg.margin
        coords, loss, _ = _descend(coords, comps, margin, cfg.step, cfg.iters)
        return coords, loss, margin
    # relative margin, annealed once at the halfway point
    margin = 1e-3 * _median_sq_dist(coords)
    coords, loss, step = _descend(coords, comps, margin, cfg.step, cfg.iters // 2)
    margin = 1e-3 * _median_sq_dist(coords)
    loss = kernels.hinge_loss_grad(coords, comps, margin)[0]
    coords, loss, _ = _descend(coords, comps, margin, step, cfg.iters - cfg.iters // 2)
    return coords, loss, margin


def fit_triplets(space, cs, cfg, threads=1):
    """Minimize the squared-distance hinge loss over the triplet comparisons
    with random restarts; returns the best embedding and its loss.

    The selected restart is the lowest-loss one (ties to the smaller restart
    index), so the result is independent of the thread count.
    """
    if cs.family != "triplet":
        raise ValueError(f"fit_triplets needs a triplet constraint set, got {cs.family!r}")
    if cs.max_index >= space.n:
        raise IndexError("constraint index out of range for the space")
    comps = np.ascontiguousarray(cs.comparisons, dtype=np.int32)
    if threads <= 1:
        # a zero-loss restart beats every later one, so stop there; the
        # selected restart matches the exhaustive scan exactly
        results = []
        for r in range(cfg.restarts):
            results.append(_fit_one(space, comps, cfg, r))
            if results[-1][1] == 0.0:
                break
    else:
        results = [
            r
            for block in map_chunks(
                lambda rs: [_fit_one(space, comps, cfg, r) for r in rs],
                [range(i, i + 1) for i in range(cfg.restarts)],
                threads,
            )
            for r in block
        ]
    best = min(range(len(results)), key=lambda r: (results[r][1], r))
    coords, loss, margin = results[best]
    emb = Embedding(space.n, cfg.d, coords)
    violations = check_constraints(emb, cs).n_violated if len(cs) else 0
    return FitResult(emb, float(loss), best, float(margin), violations)
