import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qmeans_tabu.dataset import (
    Dataset,
    DatasetError,
    load_csv,
    load_dataset,
    normalize,
    parse_csv,
    synth_gaussian_mixture,
    to_csv,
)
from qmeans_tabu.lloyd import LloydConfig, lloyd_run
from qmeans_tabu.objective import CenterSet

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
matrices = st.tuples(st.integers(1, 12), st.integers(1, 4)).flatmap(
    lambda s: arrays(np.float64, s, elements=finite)
)


def test_iris_shape(iris):
    assert (iris.n, iris.d) == (150, 4)
    assert set(iris.labels) == {"setosa", "versicolor", "virginica"}


def test_glass_shape(glass):
    assert (glass.n, glass.d) == (214, 9)


def test_single_row(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("1.0,2.0\n")
    ds = load_csv(p)
    assert (ds.n, ds.d) == (1, 2)
    np.testing.assert_array_equal(ds.points, [[1.0, 2.0]])


def test_non_numeric_names_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1.0,abc\n")
    with pytest.raises(DatasetError, match="line 1") as err:
        load_csv(p)
    assert err.value.line == 1


def test_ragged_rows():
    with pytest.raises(DatasetError, match="line 3"):
        parse_csv("1,2\n3,4\n5\n")


@pytest.mark.parametrize("text", ["", "\n\n", "a,b\n"])
def test_empty_input(text):
    with pytest.raises(DatasetError):
        parse_csv(text, has_header=True)


def test_label_column_and_delimiter():
    ds = parse_csv("x;y;cls\n1;2;a\n3;4;b\n", delimiter=";", has_header=True, label_column=2)
    np.testing.assert_array_equal(ds.points, [[1, 2], [3, 4]])
    assert ds.labels == ("a", "b")


def test_nan_rejected():
    with pytest.raises(DatasetError):
        Dataset(np.array([[1.0, np.nan]]))


def test_points_read_only(iris):
    with pytest.raises(ValueError):
        iris.points[0, 0] = 1.0


@given(matrices)
def test_csv_round_trip(x):
    ds = Dataset(x)
    back = parse_csv(to_csv(ds))
    np.testing.assert_array_equal(back.points, ds.points)


def test_csv_round_trip_with_labels(iris):
    back = parse_csv(to_csv(iris), label_column=-1)
    np.testing.assert_array_equal(back.points, iris.points)
    assert back.labels == iris.labels


def test_normalize_none_is_copy(iris):
    out, spec = normalize(iris, "none")
    assert spec.mode == "none"
    np.testing.assert_array_equal(out.points, iris.points)


def test_zscore_two_points():
    out, spec = normalize(Dataset(np.array([[0.0], [2.0]])), "zscore")
    np.testing.assert_allclose(out.points.ravel(), [-1.0, 1.0])
    assert spec.shift == (1.0,) and spec.scale == (1.0,)


def test_minmax_three_points():
    out, _ = normalize(Dataset(np.array([[2.0], [4.0], [6.0]])), "minmax")
    np.testing.assert_allclose(out.points.ravel(), [0.0, 0.5, 1.0])


def test_constant_feature_maps_to_zero():
    x = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    for mode in ("zscore", "minmax"):
        out, _ = normalize(Dataset(x), mode)
        np.testing.assert_array_equal(out.points[:, 1], 0.0)


def test_unknown_mode():
    with pytest.raises(DatasetError):
        normalize(Dataset(np.zeros((2, 2))), "robust")


@settings(max_examples=60)
@given(matrices)
def test_zscore_moments_and_idempotence(x):
    ds = Dataset(x)
    out, _ = normalize(ds, "zscore")
    assert out.points.shape == x.shape
    # features with (numerically) zero spread map to 0 and have std 0
    spread = x.std(axis=0) > 1e-6 * (np.abs(x).max(axis=0) + 1)
    np.testing.assert_allclose(out.points.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(out.points.std(axis=0)[spread], 1.0, atol=1e-9)
    again, _ = normalize(out, "zscore")
    np.testing.assert_allclose(again.points[:, spread], out.points[:, spread], atol=1e-9)


@settings(max_examples=60)
@given(matrices)
def test_minmax_bounds_and_idempotence(x):
    out, _ = normalize(Dataset(x), "minmax")
    assert out.points.min() >= 0.0 and out.points.max() <= 1.0
    again, _ = normalize(out, "minmax")
    np.testing.assert_allclose(again.points, out.points, atol=1e-9)


def test_synth_single_component():
    ds, truth = synth_gaussian_mixture(1, 5, 2, 10.0, 7)
    assert (ds.n, ds.d) == (5, 2)
    assert (truth == 0).all()


def test_synth_deterministic():
    a, ta = synth_gaussian_mixture(2, 50, 2, 20.0, 1)
    b, tb = synth_gaussian_mixture(2, 50, 2, 20.0, 1)
    assert a.points.tobytes() == b.points.tobytes()
    np.testing.assert_array_equal(ta, tb)


@pytest.mark.parametrize("k,d,sep", [(2, 2, 20.0), (5, 1, 8.0), (6, 3, 15.0)])
def test_synth_means_separated(k, d, sep):
    ds, truth = synth_gaussian_mixture(k, 200, d, sep, 3)
    means = np.array([ds.points[truth == j].mean(axis=0) for j in range(k)])
    gaps = [np.linalg.norm(means[i] - means[j]) for i in range(k) for j in range(i)]
    # sample means wander by ~1/sqrt(200) per coordinate
    assert min(gaps) >= sep - 1.0


def test_synth_lloyd_from_true_means_recovers_partition():
    ds, truth = synth_gaussian_mixture(2, 50, 2, 20.0, 1)
    true_means = np.array([ds.points[truth == j].mean(axis=0) for j in range(2)])
    res = lloyd_run(ds, CenterSet(true_means), LloydConfig())
    np.testing.assert_array_equal(res.assignment.labels, truth)


def test_registry_env_override(tmp_path, monkeypatch):
    (tmp_path / "tiny.csv").write_text("0,0\n1,1\n9,9\n")
    (tmp_path / "reg.json").write_text('{"tiny": {"path": "tiny.csv", "k": [2]}}')
    monkeypatch.setenv("QMEANS_TABU_REGISTRY", str(tmp_path / "reg.json"))
    ds, entry = load_dataset("tiny")
    assert ds.n == 3 and entry["k"] == [2]


def test_unknown_dataset():
    with pytest.raises(DatasetError, match="unknown dataset"):
        load_dataset("bavaria")
