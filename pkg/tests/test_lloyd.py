import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmeans_tabu.dataset import Dataset, synth_gaussian_mixture
from qmeans_tabu.lloyd import ClusteringResult, LloydConfig, init_kmeanspp, init_random, kmeans, lloyd_run
from qmeans_tabu.objective import CenterSet, assign, centroids, icss

from conftest import line


def test_init_random_exhausts_rows():
    ds = line(*range(7))
    m = init_random(ds, 7, seed=3)
    assert sorted(m.indices.tolist()) == list(range(7))
    np.testing.assert_array_equal(m.centers, ds.points[m.indices])


def test_init_random_single_and_deterministic(iris):
    assert init_random(iris, 1, 5).k == 1
    a, b = init_random(iris, 3, 11), init_random(iris, 3, 11)
    np.testing.assert_array_equal(a.indices, b.indices)


@pytest.mark.parametrize("init", [init_random, init_kmeanspp])
def test_k_larger_than_n(init):
    with pytest.raises(ValueError):
        init(line(0, 1), 3, 0)


def test_init_random_uniform_ish():
    ds = line(*range(5))
    counts = np.bincount([init_random(ds, 1, s).indices[0] for s in range(2000)], minlength=5)
    assert counts.min() > 300


def test_kmeanspp_zero_weight_rows_never_chosen():
    ds = line(0, 0, 0, 100)
    firsts = set()
    for seed in range(300):
        m = init_kmeanspp(ds, 2, seed)
        first, second = m.indices.tolist()
        firsts.add(first)
        if first < 3:
            assert second == 3
        else:
            assert second in (0, 1, 2)
    assert firsts == {0, 1, 2, 3}


def test_kmeanspp_distinct_when_all_rows_coincide():
    m = init_kmeanspp(line(1, 1, 1), 3, 0)
    assert sorted(m.indices.tolist()) == [0, 1, 2]


def test_kmeanspp_deterministic(glass):
    np.testing.assert_array_equal(init_kmeanspp(glass, 6, 4).indices, init_kmeanspp(glass, 6, 4).indices)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6))
def test_kmeanspp_never_picks_zero_weight_row_while_positive_remain(seed, k):
    rng = np.random.default_rng(seed)
    # heavy duplication so zero-weight rows are common
    pts = rng.integers(0, 4, size=(30, 2)).astype(float)
    ds = Dataset(pts)
    m = init_kmeanspp(ds, k, seed)
    for j in range(1, k):
        chosen = ds.points[m.indices[:j]]
        d2 = ((ds.points[:, None] - chosen[None]) ** 2).sum(-1).min(axis=1)
        d2[m.indices[:j]] = 0
        if d2.sum() > 0:
            assert d2[m.indices[j]] > 0


def test_lloyd_true_means_two_steps():
    ds, truth = synth_gaussian_mixture(2, 50, 2, 20.0, 1)
    means = np.array([ds.points[truth == j].mean(axis=0) for j in range(2)])
    res = lloyd_run(ds, CenterSet(means))
    assert res.converged and res.iterations <= 2
    np.testing.assert_array_equal(res.assignment.labels, truth)


def test_lloyd_n_equals_k():
    ds = Dataset(np.random.default_rng(0).normal(size=(6, 3)))
    res = lloyd_run(ds, init_random(ds, 6, 0))
    assert res.converged and res.iterations == 1 and res.j == 0.0


def test_lloyd_iteration_cap():
    ds, _ = synth_gaussian_mixture(4, 30, 2, 3.0, 2)
    res = lloyd_run(ds, init_random(ds, 4, 0), LloydConfig(max_iterations=1))
    assert res.iterations == 1


def test_config_validation():
    with pytest.raises(ValueError):
        LloydConfig(max_iterations=0)
    with pytest.raises(ValueError):
        LloydConfig(init="forgy")


def _check_result(ds, res: ClusteringResult):
    assert res.j == pytest.approx(icss(ds, res.centers, res.assignment), rel=1e-9, abs=1e-12)
    hist = res.history
    assert all(b <= a for a, b in zip(hist, hist[1:])), hist
    if res.converged:
        again = assign(ds, centroids(ds, res.assignment, res.centers))
        np.testing.assert_array_equal(again.labels, res.assignment.labels)
        moved = np.abs(centroids(ds, res.assignment, res.centers).centers - res.centers.centers).max()
        assert moved <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.sampled_from(["random-points", "kmeans-plus-plus"]))
def test_lloyd_monotone_and_fixed_point(seed, k, init):
    ds, _ = synth_gaussian_mixture(3, 15, 2, 2.5, seed)
    _check_result(ds, kmeans(ds, k, LloydConfig(seed=seed, init=init)))


def test_lloyd_iris_best_of_100(iris):
    js = [kmeans(iris, 3, LloydConfig(seed=s)).j for s in range(100)]
    assert min(js) == pytest.approx(78.85, abs=0.01)
