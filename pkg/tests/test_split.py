import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowsift import SplitSpec, StratificationError, read_split_csv, stratified_split, write_split_csv


def labels(n_benign, n_botnet):
    return np.concatenate([np.zeros(n_benign, np.int8), np.ones(n_botnet, np.int8)])


def test_floor_arithmetic_per_class():
    y = labels(1000, 25)
    train, test = stratified_split(y, SplitSpec(train_fraction=0.7, seed=3))
    assert np.sum(y[train] == 0) == 700
    assert np.sum(y[train] == 1) == 17
    assert np.sum(y[test] == 0) == 300
    assert np.sum(y[test] == 1) == 8


def test_symmetric_tiny_split():
    y = labels(2, 2)
    train, test = stratified_split(y, SplitSpec(train_fraction=0.5, seed=0))
    assert np.sum(y[train] == 0) == 1 and np.sum(y[train] == 1) == 1
    assert np.sum(y[test] == 0) == 1 and np.sum(y[test] == 1) == 1


def test_same_seed_identical():
    y = labels(500, 40)
    a = stratified_split(y, SplitSpec(seed=9))
    b = stratified_split(y, SplitSpec(seed=9))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_different_seed_differs():
    y = labels(500, 40)
    a = stratified_split(y, SplitSpec(seed=1))
    b = stratified_split(y, SplitSpec(seed=2))
    assert not np.array_equal(a[0], b[0])


def test_small_class_errors():
    with pytest.raises(StratificationError):
        stratified_split(labels(100, 1), SplitSpec())
    with pytest.raises(StratificationError):
        stratified_split(np.zeros(50, np.int8), SplitSpec())


def test_fraction_validated():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=1.0)
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=0.0)


@given(
    st.integers(min_value=4, max_value=400),
    st.integers(min_value=4, max_value=60),
    st.floats(min_value=0.2, max_value=0.8),
    st.integers(min_value=0, max_value=2**31),
)
@settings(max_examples=60)
def test_partition_and_prevalence(n0, n1, fraction, seed):
    y = labels(n0, n1)
    train, test = stratified_split(y, SplitSpec(train_fraction=fraction, seed=seed))
    combined = np.sort(np.concatenate([train, test]))
    assert np.array_equal(combined, np.arange(y.size))  # exact partition
    prev_all = np.mean(y == 1)
    prev_train = np.mean(y[train] == 1)
    assert abs(prev_train - prev_all) < 1.0 / min(train.size, test.size)


def test_split_csv_roundtrip(tmp_path):
    y = labels(30, 10)
    train, test = stratified_split(y, SplitSpec(seed=4))
    path = tmp_path / "split.csv"
    write_split_csv(path, train, test)
    groups = read_split_csv(path)
    assert np.array_equal(np.sort(train), groups["train"])
    assert np.array_equal(np.sort(test), groups["test"])


def test_split_csv_validation_tag(tmp_path):
    path = tmp_path / "split.csv"
    write_split_csv(path, np.array([0, 1, 2]), np.array([3]), validation=np.array([2]))
    groups = read_split_csv(path)
    assert np.array_equal(groups["train"], [0, 1])
    assert np.array_equal(groups["validation"], [2])
    assert np.array_equal(groups["test"], [3])
