import io
import json
import os
import numpy as np
import pytest
from numpy.testing import assert_allclose
from sklearn.cluster import KMeans
from pytpc.loader import DatasetManifest, InvalidParams, ParseError, ShapeMismatch, \
    SyntheticLoader, TextLoader, generate_synthetic, load_dataset, write_dataset
from pytpc.metrics import acc


def write(path, text):
    with io.open(str(path), "w", encoding="utf8") as f:
        f.write(text)
    return str(path)


@pytest.fixture
def toy(tmp_path):
    write(tmp_path / "a.csv", "1,2\n3,4\n5,6\n")
    write(tmp_path / "b.csv", "# comment\n1,0,0\n0,1,0\n\n0,0,1\n")
    write(tmp_path / "labels.txt", "0\n4\n1\n")
    manifest = {"name": "toy", "views": ["a.csv", "b.csv"], "labels": "labels.txt"}
    return write(tmp_path / "toy.json", json.dumps(manifest))


def test_load_toy(toy):
    dataset = TextLoader(toy).load()
    assert dataset.n == 3 and dataset.V == 2
    assert [v.d for v in dataset.views] == [2, 3]
    assert_allclose(dataset.views[0].values, [[1, 2], [3, 4], [5, 6]])
    assert dataset.name == "toy"
    assert dataset.n_clusters == 5


def test_row_count_mismatch(tmp_path, toy):
    write(tmp_path / "b.csv", "1,0,0\n0,1,0\n")
    with pytest.raises(ShapeMismatch):
        TextLoader(toy).load()


def test_label_count_mismatch(tmp_path, toy):
    write(tmp_path / "labels.txt", "0\n1\n")
    with pytest.raises(ShapeMismatch):
        TextLoader(toy).load()


def test_parse_error_location(tmp_path, toy):
    write(tmp_path / "a.csv", "1,2\n3,x\n5,6\n")
    with pytest.raises(ParseError) as excinfo:
        TextLoader(toy).load()
    assert excinfo.value.line == 2
    assert excinfo.value.column == 2


def test_ragged_rows(tmp_path, toy):
    write(tmp_path / "a.csv", "1,2\n3,4,5\n5,6\n")
    with pytest.raises(ParseError):
        TextLoader(toy).load()


def test_bad_label(tmp_path, toy):
    write(tmp_path / "labels.txt", "0\n-1\n1\n")
    with pytest.raises(ParseError):
        TextLoader(toy).load()


def test_missing_file(tmp_path):
    manifest = DatasetManifest(name="missing", views=[str(tmp_path / "nope.csv")])
    with pytest.raises(FileNotFoundError):
        load_dataset(manifest)


def test_whitespace_delimiter(tmp_path):
    path = write(tmp_path / "w.txt", "1 2\n3   4\n")
    dataset = load_dataset(DatasetManifest(name="w", views=[path], delimiter=None))
    assert_allclose(dataset.views[0].values, [[1, 2], [3, 4]])
    assert dataset.labels is None


def test_synthetic_balanced():
    dataset, labels = generate_synthetic(8, 4, 2, [3, 3], seed=1)
    assert dataset.n == 8 and dataset.V == 2
    assert list(np.bincount(labels)) == [2, 2, 2, 2]


def test_synthetic_deterministic():
    a, la = generate_synthetic(40, 3, 2, [4, 2], seed=5)
    b, lb = generate_synthetic(40, 3, 2, [4, 2], seed=5)
    assert np.array_equal(la, lb)
    for va, vb in zip(a.views, b.views):
        assert np.array_equal(va.values, vb.values)


def test_synthetic_views_are_separable():
    dataset, labels = generate_synthetic(300, 4, 3, [10, 10, 10], separation=10., noise=1.,
                                         seed=0)
    for view in dataset.views:
        pred = KMeans(n_clusters=4, n_init=10, random_state=0).fit_predict(view.values)
        assert acc(pred, labels) >= 0.99


def test_synthetic_invalid():
    with pytest.raises(InvalidParams):
        generate_synthetic(6, 4, 1, [2])
    with pytest.raises(InvalidParams):
        generate_synthetic(20, 4, 2, [2])
    with pytest.raises(InvalidParams):
        generate_synthetic(20, 4, 1, [2], noise=0.)


def test_write_and_reload(tmp_path):
    dataset = SyntheticLoader(n=20, K=2, V=2, dims=[3, 1], seed=2).load()
    manifest = write_dataset(dataset, str(tmp_path / "synth"))
    assert os.path.isfile(manifest)
    loaded = TextLoader(manifest).load()
    assert np.array_equal(loaded.labels, dataset.labels)
    for va, vb in zip(loaded.views, dataset.views):
        assert np.array_equal(va.values, vb.values)
    assert "n=20" in SyntheticLoader(n=20).describe()
