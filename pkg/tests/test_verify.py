import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordembed.constraints import ConstraintSet, extract_triplets
from ordembed.metric import FiniteMetricSpace, metric_from_graph, path_graph
from ordembed.verify import (
    Embedding,
    check_constraints,
    distortion,
    pairwise_distances,
    relaxation,
)

from conftest import random_graph_metric, random_point_cloud_metric


def line_embedding(coords):
    c = np.asarray(coords, dtype=float).reshape(-1, 1)
    return Embedding(c.shape[0], 1, c)


@pytest.fixture
def skewed_space():
    # delta(0,1)=1 < delta(1,2)=2.5 < delta(0,2)=3; a valid metric
    dist = np.array([[0, 1, 3], [1, 0, 2.5], [3, 2.5, 0]])
    return FiniteMetricSpace(3, dist)


def test_identity_order_embedding_clean():
    space = metric_from_graph(path_graph(3))
    cs = extract_triplets(space)
    report = check_constraints(line_embedding([0, 1, 2]), cs, space=space)
    assert report.ok and report.total == 2 and report.max_ratio == 1.0


def test_swapped_points_violate_both():
    space = metric_from_graph(path_graph(3))
    cs = extract_triplets(space)
    report = check_constraints(line_embedding([0, 2, 1]), cs, space=space)
    assert report.n_violated == 2
    items = list(report.items())
    assert all(gap > 0 for _, gap, _ in items)


def test_embedded_tie_counts_as_violation():
    cs = ConstraintSet("full", np.array([[0, 1, 2, 3]]))
    coords = np.array([[0.0], [1.0], [5.0], [6.0]])
    report = check_constraints(Embedding(4, 1, coords), cs)
    assert report.n_violated == 1  # both pairs embed at distance 1
    assert check_constraints(Embedding(4, 1, coords), cs, tie_tol=1e-9).n_violated == 1


def test_index_out_of_range():
    cs = ConstraintSet("full", np.array([[0, 1, 2, 3]]))
    with pytest.raises(IndexError):
        check_constraints(Embedding(3, 1, np.zeros((3, 1))), cs)


def test_relaxation_hand_example(skewed_space):
    # inversions of the 0,2,1 line: ratios 3, 2.5 and (via the embedded tie) 1.2
    emb = line_embedding([0.0, 2.0, 1.0])
    assert relaxation(skewed_space, emb, "full") == pytest.approx(3.0)
    assert relaxation(skewed_space, emb, "triplet") == pytest.approx(3.0)
    assert distortion(skewed_space, emb) >= 3.0


def test_relaxation_order_preserving_is_one(skewed_space):
    emb = line_embedding([0.0, 1.0, 3.2])
    assert relaxation(skewed_space, emb, "full") == 1.0


def test_relaxation_accepts_prebuilt_constraints(skewed_space):
    emb = line_embedding([0.0, 2.0, 1.0])
    cs = extract_triplets(skewed_space)
    assert relaxation(skewed_space, emb, cs) == pytest.approx(3.0)


def test_distortion_isometric_line():
    space = FiniteMetricSpace(3, np.abs(np.arange(3)[:, None] - np.arange(3)[None, :]).astype(float))
    assert distortion(space, line_embedding([0, 1, 2])) == pytest.approx(1.0)


def test_distortion_scale_free(rng):
    space = random_point_cloud_metric(8, 3, rng)
    coords = rng.standard_normal((8, 2))
    base = distortion(space, Embedding(8, 2, coords))
    scaled = distortion(space, Embedding(8, 2, coords * 37.5))
    assert scaled == pytest.approx(base, rel=1e-12)


def test_distortion_coincident_points_error():
    space = metric_from_graph(path_graph(3))
    coords = np.array([[0.0], [0.0], [1.0]])
    with pytest.raises(ValueError, match=r"\(0, 1\)"):
        distortion(space, Embedding(3, 1, coords))


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10 ** 6),
    scale=st.floats(0.01, 100.0),
    angle=st.floats(0.0, 6.28),
)
def test_relaxation_rigid_motion_invariant(seed, scale, angle):
    rng = np.random.default_rng(seed)
    space = random_point_cloud_metric(7, 3, rng)
    coords = rng.standard_normal((7, 2))
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    moved = scale * coords @ rot.T + rng.standard_normal(2)
    r1 = relaxation(space, Embedding(7, 2, coords), "full")
    r2 = relaxation(space, Embedding(7, 2, moved), "full")
    assert r2 == pytest.approx(r1, rel=1e-9)


def test_relaxation_at_most_distortion(rng):
    for _ in range(100):
        n = int(rng.integers(4, 33))
        space = (
            random_graph_metric(n, rng)
            if rng.random() < 0.5
            else random_point_cloud_metric(n, int(rng.integers(1, 5)), rng)
        )
        d = int(rng.integers(1, 5))
        emb = Embedding(n, d, rng.standard_normal((n, d)))
        assert relaxation(space, emb, "full") <= distortion(space, emb) + 1e-12


def test_violation_monotone_under_added_comparisons(rng):
    space = random_point_cloud_metric(10, 2, rng)
    cs = extract_triplets(space)
    emb = Embedding(10, 2, rng.standard_normal((10, 2)))
    full = check_constraints(emb, cs).n_violated
    half = ConstraintSet("triplet", cs.comparisons[: len(cs) // 2])
    assert check_constraints(emb, half).n_violated <= full


def test_zero_violations_iff_relaxation_one(rng):
    space = random_point_cloud_metric(9, 2, rng)
    cs = extract_triplets(space)
    for _ in range(20):
        emb = Embedding(9, 2, rng.standard_normal((9, 2)))
        clean = check_constraints(emb, cs).ok
        assert clean == (relaxation(space, emb, cs) == 1.0)


def test_norm_p_variants():
    coords = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert pairwise_distances(coords, 2.0)[0, 1] == pytest.approx(5.0)
    assert pairwise_distances(coords, 1.0)[0, 1] == pytest.approx(7.0)
    assert pairwise_distances(coords, np.inf)[0, 1] == pytest.approx(4.0)
    cs = ConstraintSet("full", np.zeros((0, 4), dtype=np.int64))
    with pytest.raises(ValueError, match="p >= 1"):
        check_constraints(Embedding(2, 2, coords), cs, norm_p=0.5)
