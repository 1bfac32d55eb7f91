import numpy as np
import pytest

from flowsift import (
    DecisionTreeClassifier,
    RandomForestClassifier,
    average_precision,
)


def _fit_forest(X, y, **kw):
    defaults = dict(n_estimators=8, max_depth=8, min_samples_split=4,
                    min_samples_leaf=2, random_state=3)
    defaults.update(kw)
    return RandomForestClassifier(**defaults).fit(X, y)


def test_degenerate_ensemble_equals_single_tree(small_dataset):
    X, y = small_dataset
    d = X.shape[1]
    forest = RandomForestClassifier(
        n_estimators=1, bootstrap=False, feature_subsample=d,
        max_depth=8, min_samples_split=4, min_samples_leaf=2, random_state=0,
    ).fit(X, y)
    tree = DecisionTreeClassifier(
        max_depth=8, min_samples_split=4, min_samples_leaf=2, random_state=0,
    ).fit(X, y)
    t = forest.trees_[0]
    assert np.array_equal(t.feature, tree.tree_.feature)
    assert np.array_equal(t.threshold, tree.tree_.threshold)
    assert np.array_equal(
        forest.predict_proba(X)[:, 1], tree.predict_proba(X)[:, 1]
    )


def test_same_seed_bit_identical(small_dataset):
    X, y = small_dataset
    a = _fit_forest(X, y, random_state=11)
    b = _fit_forest(X, y, random_state=11)
    for ta, tb in zip(a.trees_, b.trees_):
        assert np.array_equal(ta.feature, tb.feature)
        assert np.array_equal(ta.threshold, tb.threshold)
        assert np.array_equal(ta.leaf_value, tb.leaf_value)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


def test_different_seed_differs(small_dataset):
    X, y = small_dataset
    a = _fit_forest(X, y, random_state=1)
    b = _fit_forest(X, y, random_state=2)
    assert not np.array_equal(a.predict_proba(X), b.predict_proba(X))


def test_parallel_equals_sequential(small_dataset):
    X, y = small_dataset
    seq = _fit_forest(X, y, n_jobs=1, n_estimators=10)
    par = _fit_forest(X, y, n_jobs=2, n_estimators=10)
    for ta, tb in zip(seq.trees_, par.trees_):
        assert np.array_equal(ta.feature, tb.feature)
        assert np.array_equal(ta.threshold, tb.threshold)
        assert np.array_equal(ta.leaf_value, tb.leaf_value)


def test_forest_score_is_mean_of_tree_scores(small_dataset):
    X, y = small_dataset
    forest = _fit_forest(X, y)
    from flowsift.tree import _predict_tree_arrays

    per_tree = np.stack([_predict_tree_arrays(t, X) for t in forest.trees_])
    assert np.max(np.abs(forest.predict_proba(X)[:, 1] - per_tree.mean(axis=0))) < 1e-12


def test_vote_mode_equals_majority_of_hard_votes(small_dataset):
    X, y = small_dataset
    from flowsift.tree import _predict_tree_arrays

    for seed in range(4):
        forest = _fit_forest(X, y, n_estimators=7, random_state=seed)
        hard = np.stack([
            _predict_tree_arrays(t, X) >= 0.5 for t in forest.trees_
        ]).astype(np.float64)
        clean = np.all(
            np.stack([_predict_tree_arrays(t, X) != 0.5 for t in forest.trees_]),
            axis=0,
        )
        # mode of per-tree hard predictions
        mode = (hard.sum(axis=0) > forest.n_estimators / 2).astype(np.int8)
        got = forest.predict_majority(X)
        assert np.array_equal(got[clean], mode[clean])
        assert np.allclose(forest.vote_fraction(X), hard.mean(axis=0))


def test_separable_data_perfect_ap(separable_dataset):
    X, y = separable_dataset
    forest = RandomForestClassifier(
        n_estimators=25, max_depth=6, min_samples_split=2,
        min_samples_leaf=1, random_state=0,
    ).fit(X, y)
    assert average_precision(forest.predict_proba(X)[:, 1], y) == 1.0


def test_feature_subsample_default_is_sqrt(small_dataset):
    X, y = small_dataset
    forest = _fit_forest(X, y, n_estimators=2)
    assert forest.feature_subsample_ == 3  # floor(sqrt(10))


def test_scale_invariance(small_dataset):
    X, y = small_dataset
    base = _fit_forest(X, y).predict_proba(X)[:, 1]
    scale = np.ones(X.shape[1])
    scale[:5] = [2.0, 0.5, 4.0, 0.125, 16.0]
    Xs = X * scale
    scaled = _fit_forest(Xs, y).predict_proba(Xs)[:, 1]
    assert np.array_equal(scaled, base)


def test_param_validation(small_dataset):
    X, y = small_dataset
    with pytest.raises(ValueError):
        RandomForestClassifier(n_estimators=0).fit(X, y)
    with pytest.raises(ValueError):
        RandomForestClassifier(feature_subsample=99).fit(X, y)


def test_bootstrap_changes_trees(small_dataset):
    X, y = small_dataset
    with_boot = _fit_forest(X, y, n_estimators=2)
    without = _fit_forest(X, y, n_estimators=2, bootstrap=False)
    assert not np.array_equal(
        with_boot.predict_proba(X), without.predict_proba(X)
    )
