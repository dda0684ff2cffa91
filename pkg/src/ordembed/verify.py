"""Checking embeddings against constraint sets; empirical relaxation and
distortion."""

import csv
from dataclasses import dataclass

import numpy as np

from ordembed.constraints import Comparison, ConstraintSet, extract_family

_ROW_CHUNK = 256


@dataclass(frozen=True)
class Embedding:
    """n points in d-dimensional real coordinates."""

    n: int
    d: int
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.float64)
        if c.shape != (self.n, self.d):
            raise ValueError(f"coords must be {self.n}x{self.d}, got {c.shape}")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)


def pairwise_distances(coords, p=2.0):
    """Full matrix of l_p distances between coordinate rows."""
    n = coords.shape[0]
    if p == 2.0:
        sq = np.einsum("ij,ij->i", coords, coords)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (coords @ coords.T)
        np.maximum(d2, 0.0, out=d2)
        out = np.sqrt(d2)
    else:
        out = np.empty((n, n))
        for lo in range(0, n, _ROW_CHUNK):
            hi = min(lo + _ROW_CHUNK, n)
            diff = np.abs(coords[lo:hi, None, :] - coords[None, :, :])
            if np.isinf(p):
                out[lo:hi] = diff.max(axis=2)
            else:
                out[lo:hi] = (diff ** p).sum(axis=2) ** (1.0 / p)
    np.fill_diagonal(out, 0.0)
    return out


def _validate_norm(p):
    if not (p >= 1.0):
        raise ValueError("norm exponent must satisfy p >= 1")


@dataclass
class ViolationReport:
    """Comparisons whose embedded order contradicts the source order.

    ``violated_rows`` holds the offending (a,b,c,d) rows; ``delta_gaps`` the
    source gaps delta(c,d)-delta(a,b) (when a space was supplied),
    ``emb_gaps`` the embedded gaps ||phi(c)-phi(d)|| - ||phi(a)-phi(b)||.
    ``max_ratio`` is the largest inverted source ratio, at least 1.
    """

    total: int
    violated_rows: np.ndarray
    emb_gaps: np.ndarray
    delta_gaps: np.ndarray = None
    max_ratio: float = None

    @property
    def n_violated(self):
        return int(self.violated_rows.shape[0])

    @property
    def ok(self):
        return self.n_violated == 0

    def items(self):
        """Yield (Comparison, delta_gap_or_None, embedded_gap) per violation."""
        for i, row in enumerate(self.violated_rows):
            gap = None if self.delta_gaps is None else float(self.delta_gaps[i])
            yield Comparison(*map(int, row)), gap, float(self.emb_gaps[i])

    def to_dict(self):
        return {
            "total": self.total,
            "n_violated": self.n_violated,
            "max_ratio": self.max_ratio,
            "violations": [
                {
                    "comparison": list(map(int, row)),
                    "delta_gap": None if self.delta_gaps is None else float(self.delta_gaps[i]),
                    "embedded_gap": float(self.emb_gaps[i]),
                }
                for i, row in enumerate(self.violated_rows)
            ],
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["a", "b", "c", "d", "delta_gap", "embedded_gap"])
            for i, row in enumerate(self.violated_rows):
                gap = "" if self.delta_gaps is None else repr(float(self.delta_gaps[i]))
                writer.writerow([*map(int, row), gap, repr(float(self.emb_gaps[i]))])


def check_constraints(emb, cs, norm_p=2.0, tie_tol=0.0, space=None):
    """Violations of ``cs`` in the embedding.

    A comparison (a,b) < (c,d) is violated iff
    ||phi(a)-phi(b)||_p >= ||phi(c)-phi(d)||_p - tie_tol, i.e. an embedded
    tie on a strict source comparison counts as a violation.  Source-side
    gap/ratio fields are filled only when ``space`` is given.
    """
    _validate_norm(norm_p)
    if tie_tol < 0:
        raise ValueError("tie_tol must be >= 0")
    if cs.max_index >= emb.n:
        raise IndexError(f"comparison index {cs.max_index} out of range for n={emb.n}")
    comps = cs.comparisons
    demb = pairwise_distances(emb.coords, norm_p)
    lhs = demb[comps[:, 0], comps[:, 1]]
    rhs = demb[comps[:, 2], comps[:, 3]]
    bad = lhs >= rhs - tie_tol
    rows = comps[bad]
    emb_gaps = (rhs - lhs)[bad]
    delta_gaps = None
    max_ratio = None
    if space is not None:
        src_small = space.dist[comps[:, 0], comps[:, 1]]
        src_large = space.dist[comps[:, 2], comps[:, 3]]
        delta_gaps = (src_large - src_small)[bad]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = src_large[bad] / src_small[bad]
        max_ratio = float(max(1.0, ratios.max())) if ratios.size else 1.0
    return ViolationReport(len(cs), rows, emb_gaps, delta_gaps, max_ratio)


def relaxation(space, emb, family="full", norm_p=2.0, terminals=None, k=None):
    """Largest source-distance ratio among order-inverted comparisons (>= 1).

    ``family`` is a family tag or a prebuilt ConstraintSet.  An embedded tie
    on a strict source comparison counts as an inversion.  Returns exactly 1
    when the embedding preserves every strict comparison of the family.
    """
    _validate_norm(norm_p)
    if isinstance(family, ConstraintSet):
        cs = family
    else:
        cs = extract_family(space, family, terminals=terminals, k=k, tie_policy="skip")
    if len(cs) == 0:
        return 1.0
    comps = cs.comparisons
    demb = pairwise_distances(emb.coords, norm_p)
    inverted = demb[comps[:, 0], comps[:, 1]] >= demb[comps[:, 2], comps[:, 3]]
    if not inverted.any():
        return 1.0
    small = space.dist[comps[inverted, 0], comps[inverted, 1]]
    large = space.dist[comps[inverted, 2], comps[inverted, 3]]
    with np.errstate(divide="ignore"):
        ratios = large / small
    return float(max(1.0, ratios.max()))


def distortion(space, emb, norm_p=2.0):
    """Scale-free bi-Lipschitz constant: max expansion times max contraction."""
    _validate_norm(norm_p)
    if space.n < 2:
        raise ValueError("distortion needs at least two points")
    if emb.n != space.n:
        raise ValueError("embedding and space disagree on n")
    iu = np.triu_indices(space.n, 1)
    src = space.dist[iu]
    dst = pairwise_distances(emb.coords, norm_p)[iu]
    zero = dst == 0.0
    if zero.any():
        i = int(np.flatnonzero(zero)[0])
        raise ValueError(f"coincident embedded points ({int(iu[0][i])}, {int(iu[1][i])})")
    expansion = float((dst / src).max())
    contraction = float((src / dst).max())
    return expansion * contraction
