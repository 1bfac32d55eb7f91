"""CART decision tree grown by greedy Gini minimization.

Split thresholds are midpoints between consecutive distinct sorted feature
values; routing sends values <= threshold left. Leaves store the positive
fraction of their training samples, which is the probability the tree
assigns. Tie-breaks (lowest feature index, then lowest threshold) and the
exact split-score arithmetic are fixed so training is bit-reproducible.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import _tree_kernels as _k
from .errors import FitError, SchemaError


def gini(pos: int, neg: int) -> float:
    """Binary Gini impurity 1 - p0^2 - p1^2; in [0, 0.5]."""
    n = pos + neg
    if n <= 0:
        raise ValueError("Gini impurity of an empty node is undefined")
    if pos < 0 or neg < 0:
        raise ValueError("class counts must be non-negative")
    p1 = pos / n
    p0 = neg / n
    return 1.0 - p0 * p0 - p1 * p1


class Split(NamedTuple):
    feature: int
    threshold: float
    weighted_gini: float


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    candidate_features: Sequence[int] | None = None,
    min_samples_leaf: int = 1,
) -> Split | None:
    """Best (feature, midpoint threshold) by weighted child Gini.

    Returns None when no candidate split strictly reduces impurity or every
    split would leave a child below ``min_samples_leaf``. Ties go to the
    lowest feature index, then the lowest threshold.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int8)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("X must be (n, d) with matching labels, n >= 1")
    if candidate_features is None:
        cands = np.arange(X.shape[1], dtype=np.int64)
    else:
        cands = np.sort(np.asarray(list(candidate_features), dtype=np.int64))
    feat, thr, score, _pos = _k._best_split_kernel(X, y, cands, min_samples_leaf)
    if feat < 0:
        return None
    return Split(int(feat), float(thr), 1.0 - score / X.shape[0])


def _validate_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int8)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise FitError("training data must be a non-empty (n, d) matrix")
    if y.shape != (X.shape[0],):
        raise FitError("labels must align with rows")
    if not np.isfinite(X).all():
        raise FitError("features must be finite")
    if np.any((y != 0) & (y != 1)):
        raise FitError("labels must be binary 0/1")
    return X, y


def _node_capacity(n: int, min_leaf: int, max_depth: int) -> int:
    by_samples = 2 * max(1, n // max(min_leaf, 1)) + 1
    by_depth = (1 << min(max_depth + 1, 62)) - 1
    return min(by_samples, by_depth, 2 * n + 1)


class TreeArrays(NamedTuple):
    """Flat preorder node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_value: np.ndarray
    n_samples: np.ndarray


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_samples_split: int,
    min_samples_leaf: int,
    feature_subsample: int,
    feat_seed: np.uint64,
) -> TreeArrays:
    n, d = X.shape
    orders = np.empty((d, n), np.int32)
    for f in range(d):
        orders[f] = np.argsort(X[:, f], kind="stable")
    rows = np.empty((d, n), np.int32)
    vals = np.empty((d, n), np.float64)
    for f in range(d):
        rows[f] = orders[f]
        vals[f] = X[orders[f], f]
    cap = _node_capacity(n, min_samples_leaf, max_depth)
    feature = np.empty(cap, np.int32)
    threshold = np.empty(cap, np.float64)
    left = np.empty(cap, np.int32)
    right = np.empty(cap, np.int32)
    leaf_value = np.empty(cap, np.float64)
    n_node = np.empty(cap, np.int64)
    go_left = np.zeros(n, np.uint8)
    tmp_rows = np.empty(n, np.int32)
    tmp_vals = np.empty(n, np.float64)
    count = _k._build_tree(
        X, y, rows, vals, n, max_depth, min_samples_split, min_samples_leaf,
        feature_subsample, feat_seed, feature, threshold, left, right,
        leaf_value, n_node, go_left, tmp_rows, tmp_vals,
    )
    return TreeArrays(
        feature[:count].copy(), threshold[:count].copy(), left[:count].copy(),
        right[:count].copy(), leaf_value[:count].copy(), n_node[:count].copy(),
    )


def _predict_tree_arrays(tree: TreeArrays, X: np.ndarray) -> np.ndarray:
    offsets = np.array([0, tree.feature.shape[0]], np.int64)
    out = np.empty(X.shape[0], np.float64)
    _k._predict_ensemble(
        X, tree.feature, tree.threshold, tree.left, tree.right,
        tree.leaf_value, offsets, 0, out,
    )
    return out


class DecisionTreeClassifier(BaseEstimator, ClassifierMixin):
    """Binary CART classifier scoring flows by leaf positive fraction.

    ``feature_subsample`` restricts each node's split search to a fresh
    random subset of that many features (forest mode); the default searches
    every feature and uses no randomness.
    """

    def __init__(
        self,
        max_depth: int = 20,
        min_samples_split: int = 20,
        min_samples_leaf: int = 10,
        feature_subsample: int | None = None,
        random_state: int = 0,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.feature_subsample = feature_subsample
        self.random_state = random_state

    def _check_params(self, d: int) -> int:
        if self.max_depth < 1 or self.min_samples_split < 1 or self.min_samples_leaf < 1:
            raise ValueError("tree size constraints must all be >= 1")
        m = d if self.feature_subsample is None else int(self.feature_subsample)
        if not 1 <= m <= d:
            raise ValueError(f"feature_subsample must lie in [1, {d}]")
        return m

    def fit(self, X, y) -> "DecisionTreeClassifier":
        from . import rng

        X, y = _validate_xy(X, y)
        m = self._check_params(X.shape[1])
        seed = rng.derive(self.random_state, rng.STREAM_NODE_FEATS, 0)
        self.tree_ = _grow_tree(
            X, y, self.max_depth, self.min_samples_split,
            self.min_samples_leaf, m, seed,
        )
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        self.node_count_ = self.tree_.feature.shape[0]
        return self

    def _check_matrix(self, X) -> np.ndarray:
        if not hasattr(self, "tree_"):
            raise FitError("model is not fitted")
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise SchemaError(
                f"expected (n, {self.n_features_in_}) feature matrix"
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_matrix(X)
        p1 = _predict_tree_arrays(self.tree_, X)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= threshold).astype(np.int8)
