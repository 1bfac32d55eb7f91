"""Bagged random forest over the CART trees.

Each tree trains on a bootstrap resample (n draws with replacement, its own
sub-seed) and searches a fresh random subset of floor(sqrt(d)) features at
every node. The forest score is the mean leaf positive fraction across
trees; the classical hard majority vote is available separately and agrees
with thresholding the mean hard vote at 0.5. Per-tree sub-seeding makes
parallel and sequential training produce identical models.
"""

from __future__ import annotations

import math

import numpy as np
import numba
from sklearn.base import BaseEstimator, ClassifierMixin

from . import _tree_kernels as _k
from . import rng
from .errors import FitError, SchemaError
from .tree import TreeArrays, _node_capacity, _validate_xy

_BATCH = 16


class RandomForestClassifier(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        n_estimators: int = 300,
        max_depth: int = 20,
        min_samples_split: int = 20,
        min_samples_leaf: int = 10,
        feature_subsample: int | None = None,
        bootstrap: bool = True,
        n_jobs: int | None = None,
        random_state: int = 0,
    ):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.feature_subsample = feature_subsample
        self.bootstrap = bootstrap
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _resolved_m(self, d: int) -> int:
        if self.feature_subsample is None:
            return max(1, int(math.isqrt(d)))
        m = int(self.feature_subsample)
        if not 1 <= m <= d:
            raise ValueError(f"feature_subsample must lie in [1, {d}]")
        return m

    def fit(self, X, y) -> "RandomForestClassifier":
        X, y = _validate_xy(X, y)
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.max_depth < 1 or self.min_samples_split < 1 or self.min_samples_leaf < 1:
            raise ValueError("tree size constraints must all be >= 1")
        n, d = X.shape
        m = self._resolved_m(d)
        orders = np.empty((d, n), np.int32)
        for f in range(d):
            orders[f] = np.argsort(X[:, f], kind="stable")
        boot_seeds = np.array(
            [rng.derive(self.random_state, rng.STREAM_BOOTSTRAP, k)
             for k in range(self.n_estimators)],
            dtype=np.uint64,
        )
        feat_seeds = np.array(
            [rng.derive(self.random_state, rng.STREAM_NODE_FEATS, k)
             for k in range(self.n_estimators)],
            dtype=np.uint64,
        )
        cap = _node_capacity(n, self.min_samples_leaf, self.max_depth)
        trees: list[TreeArrays] = []
        old_threads = numba.get_num_threads()
        if self.n_jobs is not None and self.n_jobs >= 1:
            numba.set_num_threads(self.n_jobs)
        try:
            for start in range(0, self.n_estimators, _BATCH):
                b = min(_BATCH, self.n_estimators - start)
                feature = np.empty((b, cap), np.int32)
                threshold = np.empty((b, cap), np.float64)
                left = np.empty((b, cap), np.int32)
                right = np.empty((b, cap), np.int32)
                leaf = np.empty((b, cap), np.float64)
                nn = np.empty((b, cap), np.int64)
                counts = np.empty(b, np.int64)
                _k._build_forest_batch(
                    X, y, orders, boot_seeds[start:start + b],
                    feat_seeds[start:start + b],
                    1 if self.bootstrap else 0,
                    self.max_depth, self.min_samples_split,
                    self.min_samples_leaf, m,
                    feature, threshold, left, right, leaf, nn, counts,
                )
                for i in range(b):
                    c = counts[i]
                    trees.append(TreeArrays(
                        feature[i, :c].copy(), threshold[i, :c].copy(),
                        left[i, :c].copy(), right[i, :c].copy(),
                        leaf[i, :c].copy(), nn[i, :c].copy(),
                    ))
        finally:
            numba.set_num_threads(old_threads)
        self.trees_ = trees
        self._flatten()
        self.n_features_in_ = d
        self.feature_subsample_ = m
        self.classes_ = np.array([0, 1])
        return self

    def _flatten(self) -> None:
        """Concatenate per-tree node arrays; child links become absolute."""
        sizes = [t.feature.shape[0] for t in self.trees_]
        offsets = np.zeros(len(sizes) + 1, np.int64)
        np.cumsum(sizes, out=offsets[1:])
        self._offsets = offsets
        self._feature = np.concatenate([t.feature for t in self.trees_])
        self._threshold = np.concatenate([t.threshold for t in self.trees_])
        self._leaf = np.concatenate([t.leaf_value for t in self.trees_])
        left_parts = []
        right_parts = []
        for t, off in zip(self.trees_, offsets[:-1]):
            shift = np.where(t.left >= 0, np.int32(off), 0).astype(np.int32)
            left_parts.append(t.left + shift)
            shift = np.where(t.right >= 0, np.int32(off), 0).astype(np.int32)
            right_parts.append(t.right + shift)
        self._left = np.concatenate(left_parts)
        self._right = np.concatenate(right_parts)

    def _check_matrix(self, X) -> np.ndarray:
        if not hasattr(self, "trees_"):
            raise FitError("model is not fitted")
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise SchemaError(
                f"expected (n, {self.n_features_in_}) feature matrix"
            )
        return X

    def _score(self, X: np.ndarray, vote: int) -> np.ndarray:
        out = np.empty(X.shape[0], np.float64)
        old_threads = numba.get_num_threads()
        if self.n_jobs is not None and self.n_jobs >= 1:
            numba.set_num_threads(self.n_jobs)
        try:
            _k._predict_ensemble(
                X, self._feature, self._threshold, self._left, self._right,
                self._leaf, self._offsets, vote, out,
            )
        finally:
            numba.set_num_threads(old_threads)
        return out

    def predict_proba(self, X) -> np.ndarray:
        """Positive probability = mean leaf fraction over trees."""
        p1 = self._score(self._check_matrix(X), 0)
        return np.column_stack([1.0 - p1, p1])

    def vote_fraction(self, X) -> np.ndarray:
        """Fraction of trees whose leaf fraction reaches 0.5 (hard votes)."""
        return self._score(self._check_matrix(X), 1)

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= threshold).astype(np.int8)

    def predict_majority(self, X) -> np.ndarray:
        """Classical majority vote across trees (ties go to the positive
        class, matching the inclusive decision rule)."""
        return (self.vote_fraction(X) >= 0.5).astype(np.int8)
