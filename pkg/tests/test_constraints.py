import math

import numpy as np
import pytest

from ordembed.constraints import (
    Comparison,
    ConstraintSet,
    TieError,
    count_triplet_orderings_exact,
    extract_full,
    extract_terminal,
    extract_topk,
    extract_triplets,
    jitter_metric,
    log_superfactorial,
    triplet_projection_oracle,
)
from ordembed.metric import FiniteMetricSpace, metric_from_graph, path_graph

from conftest import random_graph_metric, random_point_cloud_metric


def line_metric(coords):
    c = np.asarray(coords, dtype=float)
    return FiniteMetricSpace(len(c), np.abs(c[:, None] - c[None, :]))


def test_comparison_invariants():
    with pytest.raises(ValueError):
        Comparison(0, 0, 1, 2)
    with pytest.raises(ValueError):
        Comparison(0, 1, 1, 0)
    assert Comparison(0, 1, 0, 2).as_row() == (0, 1, 0, 2)


def test_triplets_on_three_path():
    space = metric_from_graph(path_graph(3))
    cs = extract_triplets(space)  # anchor 1 is tied, skipped
    got = {tuple(r) for r in cs.comparisons}
    assert got == {(0, 1, 0, 2), (2, 1, 2, 0)}


def test_triplet_count_tie_free():
    space = line_metric([0.0, 1.0, 3.0, 7.0])
    cs = extract_triplets(space)
    assert len(cs) == 4 * 3  # n * C(n-1, 2)


def test_triplet_tie_error_names_triple():
    dist = np.ones((3, 3)) - np.eye(3)
    space = FiniteMetricSpace(3, dist)
    with pytest.raises(TieError, match="anchor"):
        extract_triplets(space, tie_policy="error")
    assert len(extract_triplets(space, tie_policy="skip")) == 0


def test_comparisons_consistent_with_source(rng):
    for _ in range(5):
        space = random_point_cloud_metric(int(rng.integers(4, 12)), 3, rng)
        for cs in (
            extract_triplets(space),
            extract_full(space),
            extract_topk(space, 2, mixed=True),
        ):
            a, b, c, d = cs.comparisons.T
            assert np.all(space.dist[a, b] < space.dist[c, d])


def test_terminal_single_terminal():
    space = line_metric([0.0, 1.0, 2.0])
    cs = extract_terminal(space, [0])
    assert [tuple(r) for r in cs.comparisons] == [(0, 1, 0, 2)]


def test_terminal_pair_count():
    dist = np.zeros((4, 4))
    vals = {(0, 2): 1.0, (0, 3): 2.0, (1, 2): 3.0, (1, 3): 4.0, (0, 1): 0.5, (2, 3): 0.25}
    for (i, j), v in vals.items():
        dist[i, j] = dist[j, i] = v
    space = FiniteMetricSpace(4, dist)
    cs = extract_terminal(space, [0, 1])
    assert len(cs) == 6  # C(k(n-k), 2) = C(4, 2)
    assert cs.terminals == frozenset({0, 1})


def test_terminal_strict_subset_required():
    space = line_metric([0.0, 1.0, 2.0])
    with pytest.raises(ValueError, match="strict subset"):
        extract_terminal(space, [0, 1, 2])


def test_terminal_tie_error():
    space = metric_from_graph(path_graph(4))
    with pytest.raises(TieError):
        extract_terminal(space, [1, 2])


def test_topk_line_metric_examples():
    space = line_metric([0.0, 1.0, 3.0, 7.0])
    cs1 = extract_topk(space, 1, mixed=False)
    assert len(cs1) == 0  # each point contributes C(1,2)=0
    cs2 = extract_topk(space, 2, mixed=False)
    assert len(cs2) == 4  # one per anchor
    got = {tuple(r) for r in cs2.comparisons}
    assert got == {(0, 1, 0, 2), (1, 0, 1, 2), (2, 1, 2, 0), (3, 2, 3, 1)}


def test_topk_boundary_tie_is_hard_error():
    space = metric_from_graph(path_graph(3))  # point 1 has two distance-1 neighbors
    with pytest.raises(TieError, match="boundary"):
        extract_topk(space, 1, mixed=False)
    jittered = jitter_metric(space, 1e-6, seed=5)
    assert len(extract_topk(jittered, 1, mixed=False)) == 0


def test_topk_full_equivalence_small(rng):
    for n in (4, 5, 6):
        space = random_point_cloud_metric(n, 3, rng)
        full = extract_full(space)
        mixed = extract_topk(space, n - 1, mixed=True)
        assert len(mixed) == len(full) == math.comb(math.comb(n, 2), 2)
        assert {tuple(r) for r in mixed.comparisons} == {tuple(r) for r in full.comparisons}


def test_family_invariant_validation():
    with pytest.raises(ValueError, match="anchor"):
        ConstraintSet("triplet", np.array([[0, 1, 2, 3]]))
    with pytest.raises(ValueError, match="terminal set"):
        ConstraintSet("terminal", np.array([[0, 1, 0, 2]]))
    with pytest.raises(ValueError, match="anchor at terminals"):
        ConstraintSet("terminal", np.array([[1, 2, 0, 3]]), terminals=frozenset({0}))
    with pytest.raises(ValueError, match="itself"):
        ConstraintSet("full", np.array([[0, 1, 1, 0]]))


def test_extraction_is_canonical_and_deterministic(rng):
    space = random_graph_metric(12, rng)
    a = extract_triplets(space).comparisons
    b = extract_triplets(space).comparisons
    assert np.array_equal(a, b)
    assert np.array_equal(a, a[np.lexsort((a[:, 3], a[:, 2], a[:, 1], a[:, 0]))])


# -- ordering counts ---------------------------------------------------------

def test_count_formula_small_values():
    assert count_triplet_orderings_exact(3) == 6
    assert count_triplet_orderings_exact(4) == 360  # (3!/0!)(4!/2!)(5!/4!)


def test_closed_form_vs_projection_oracle():
    """The closed form matches the oracle at n=3 but NOT at n=4/5; both
    numbers stay exposed side by side (never silently merged)."""
    assert triplet_projection_oracle(3) == 6 == count_triplet_orderings_exact(3)
    assert triplet_projection_oracle(4) == 426 != count_triplet_orderings_exact(4)


def test_oracle_guard():
    with pytest.raises(ValueError, match="infeasible"):
        triplet_projection_oracle(6)


def test_log_superfactorial_values():
    assert log_superfactorial(1) == 0.0
    assert log_superfactorial(2) == 0.0  # 0!*1! = 1
    assert log_superfactorial(4) == pytest.approx(math.log(12.0), rel=1e-15)
    direct = math.fsum(math.lgamma(i + 1) for i in range(1, 1000))
    assert log_superfactorial(1000) == pytest.approx(direct, rel=1e-12)


def test_log_superfactorial_asymptote_monotone():
    ratios = [
        log_superfactorial(n) / ((n ** 2 / 2.0) * math.log(n)) for n in (100, 1000, 10000)
    ]
    assert ratios[0] < ratios[1] < ratios[2] < 1.0


def test_count_at_least_superfactorial():
    for n in (3, 4, 5, 8, 20):
        assert math.log(count_triplet_orderings_exact(n)) >= log_superfactorial(n)
