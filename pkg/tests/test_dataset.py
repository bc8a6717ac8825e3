# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from core.dataset import Dataset, describe, kfold_split, load_dataset, load_labels, load_matrix, write_dataset
from core.errors import DataFormatError, DimensionMismatchError


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


# --- load_dataset ---

def test_load_all_ones_labels(tmp_path):
    features = _write(tmp_path / "x.txt", "0.5,1.5\n2.0 3.0\n")
    labels = _write(tmp_path / "y.txt", "1,1\n1,1\n")
    ds = load_dataset(features, labels)
    assert (ds.n, ds.d, ds.q) == (2, 2, 2)
    assert np.all(ds.labels == 1)
    np.testing.assert_array_equal(ds.features, [[0.5, 1.5], [2.0, 3.0]])


def test_zero_one_labels_are_mapped(tmp_path):
    features = _write(tmp_path / "x.txt", "1\n2\n")
    labels = _write(tmp_path / "y.txt", "0,1\n1,0\n")
    ds = load_dataset(features, labels)
    np.testing.assert_array_equal(ds.labels, [[-1, 1], [1, -1]])


def test_plus_minus_labels_and_header(tmp_path):
    labels = _write(tmp_path / "y.txt", "#labels happy,sad,calm\n+1 -1 -1\n-1 1 1\n")
    values, names = load_labels(labels)
    assert names == ["happy", "sad", "calm"]
    np.testing.assert_array_equal(values, [[1, -1, -1], [-1, 1, 1]])


def test_row_count_mismatch(tmp_path):
    features = _write(tmp_path / "x.txt", "1\n2\n3\n")
    labels = _write(tmp_path / "y.txt", "0,1\n1,0\n")
    with pytest.raises(DimensionMismatchError):
        load_dataset(features, labels)


def test_ragged_row_reports_line(tmp_path):
    path = _write(tmp_path / "x.txt", "1,2\n3,4\n5\n")
    with pytest.raises(DimensionMismatchError) as info:
        load_matrix(path)
    assert info.value.line == 3


def test_non_numeric_token(tmp_path):
    path = _write(tmp_path / "x.txt", "1,2\n3,abc\n")
    with pytest.raises(DataFormatError, match="abc") as info:
        load_matrix(path)
    assert info.value.line == 2


def test_bad_label_token(tmp_path):
    path = _write(tmp_path / "y.txt", "0,1\n2,0\n")
    with pytest.raises(DataFormatError, match="'2'"):
        load_labels(path)


def test_empty_field_is_reported(tmp_path):
    path = _write(tmp_path / "x.txt", "1,,2\n3,4,5\n")
    with pytest.raises(DataFormatError, match="empty field in column 2") as info:
        load_matrix(path)
    assert info.value.line == 1


def test_padded_commas_and_tabs_split_alike(tmp_path):
    np.testing.assert_array_equal(load_matrix(_write(tmp_path / "x.txt", "1 , 2\n3\t4\n")), [[1, 2], [3, 4]])


@pytest.mark.parametrize("header", ["#labels quiet still,sad", "#labels a,,b"])
def test_unstorable_header_names_rejected(tmp_path, header):
    path = _write(tmp_path / "y.txt", header + "\n0,1,1\n1,0,0\n")
    with pytest.raises(DataFormatError, match="invalid label name") as info:
        load_labels(path)
    assert info.value.line == 1


def test_dataset_rejects_names_with_whitespace():
    with pytest.raises(DataFormatError, match="invalid label name"):
        Dataset(np.zeros((2, 1)), np.array([[1.0, -1.0], [-1.0, 1.0]]), names=("quiet still", "sad"))


@pytest.mark.parametrize("text", ["", "\n\n  \n"])
def test_empty_file(tmp_path, text):
    with pytest.raises(DataFormatError, match="empty"):
        load_matrix(_write(tmp_path / "x.txt", text))


def test_non_finite_features_rejected(tmp_path):
    with pytest.raises(DataFormatError):
        load_matrix(_write(tmp_path / "x.txt", "1,nan\n2,3\n"))


def test_single_label_rejected():
    with pytest.raises(DataFormatError, match="at least 2 labels"):
        Dataset(np.zeros((3, 1)), np.ones((3, 1)))


def test_dataset_is_read_only(small_dataset):
    with pytest.raises(ValueError):
        small_dataset.features[0, 0] = 1.0
    with pytest.raises(ValueError):
        small_dataset.labels[0, 0] = 1.0


def test_write_and_reload_is_bit_exact(tmp_path, rng):
    features = rng.standard_normal((7, 3)) * 1e3
    labels = np.where(rng.random((7, 4)) < 0.5, 1.0, -1.0)
    ds = Dataset(features, labels, ("a", "b", "c", "d"))
    write_dataset(ds, tmp_path / "x.txt", tmp_path / "y.txt")
    again = load_dataset(tmp_path / "x.txt", tmp_path / "y.txt")
    assert np.array_equal(again.features, ds.features)
    assert np.array_equal(again.labels, ds.labels)
    assert again.names == ds.names


def test_subset_keeps_names(small_dataset):
    names_ds = Dataset(small_dataset.features, small_dataset.labels, ("p", "q", "r", "s"))
    part = names_ds.subset([0, 3, 5])
    assert part.n == 3
    assert part.names == ("p", "q", "r", "s")
    np.testing.assert_array_equal(part.features[1], small_dataset.features[3])


# --- kfold_split ---

def test_leave_one_out_folds():
    split = kfold_split(10, 10, seed=1)
    assert split.fold_sizes() == [1] * 10


def test_balanced_fold_sizes():
    assert sorted(kfold_split(5, 2, seed=3).fold_sizes()) == [2, 3]
    assert sorted(kfold_split(3, 2, seed=0).fold_sizes()) == [1, 2]


def test_split_is_deterministic():
    a = kfold_split(100, 10, seed=7)
    b = kfold_split(100, 10, seed=7)
    assert np.array_equal(a.assignments, b.assignments)
    assert not np.array_equal(a.assignments, kfold_split(100, 10, seed=8).assignments)


def test_folds_partition_indices():
    split = kfold_split(23, 4, seed=11)
    seen = np.concatenate([split.test_indices(f) for f in range(4)])
    assert sorted(seen.tolist()) == list(range(23))
    for f in range(4):
        assert set(split.train_indices(f)).isdisjoint(split.test_indices(f))
    sizes = split.fold_sizes()
    assert max(sizes) - min(sizes) <= 1


@pytest.mark.parametrize("n,k", [(5, 1), (5, 0), (3, 4)])
def test_invalid_fold_count(n, k):
    with pytest.raises(ValueError):
        kfold_split(n, k, seed=0)


def test_negative_seed_rejected():
    with pytest.raises(ValueError, match="non-negative"):
        kfold_split(5, 2, seed=-1)


# --- describe ---

def test_describe_cardinality():
    features = np.array([[0.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    labels = np.array([[1, -1, -1], [1, 1, -1], [1, -1, -1]], dtype=float)
    summary = describe(Dataset(features, labels))
    assert (summary.n, summary.d, summary.q) == (3, 2, 3)
    assert summary.cardinality == pytest.approx(4 / 3)
    assert summary.density == pytest.approx(4 / 9)
    assert summary.distinct_label_sets == 2
    assert summary.feature_type == "nominal"


def test_describe_all_negative_and_all_positive(rng):
    features = rng.standard_normal((5, 2))
    assert describe(Dataset(features, -np.ones((5, 4)))).cardinality == 0
    summary = describe(Dataset(features, np.ones((5, 4))))
    assert summary.cardinality == 4
    assert summary.feature_type == "numeric"


EMOTIONS_DIR = os.environ.get("COLLABEL_EMOTIONS_DIR")


@pytest.mark.skipif(not EMOTIONS_DIR, reason="COLLABEL_EMOTIONS_DIR not set")
def test_describe_emotions():
    from pathlib import Path
    base = Path(EMOTIONS_DIR)
    summary = describe(load_dataset(base / "features.txt", base / "labels.txt"))
    assert (summary.n, summary.d, summary.q) == (593, 72, 6)
    assert summary.cardinality == pytest.approx(1.87, abs=0.01)
