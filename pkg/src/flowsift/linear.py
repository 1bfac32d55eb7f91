"""Logistic regression trained with seeded mini-batch gradient descent.

The objective is mean log-loss plus an L2 penalty (l2/2)*||w||^2 on the
weights (never the bias). Weights start at zero and each epoch visits the
data in a freshly shuffled seeded order, so training is deterministic.
Expects standardized features; the pipeline enforces that wiring.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import rng
from .errors import FitError, SchemaError, TrainingDivergedError
from .tree import _validate_xy


def sigmoid(z):
    """Numerically stable logistic function; scalar or ndarray."""
    arr = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(arr))
    out = np.where(arr >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if np.isscalar(z) or arr.ndim == 0 else out


def logistic_loss_grad(
    w: np.ndarray,
    b: float,
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 0.0,
    pos_weight: float = 1.0,
) -> tuple[float, np.ndarray, float]:
    """Weighted mean log-loss with L2 penalty, and its analytic gradient."""
    z = X @ w + b
    y = y.astype(np.float64)
    sw = np.where(y == 1.0, pos_weight, 1.0)
    # log(1 + e^-z) computed stably; bce = softplus(-z) + (1-y) z
    softplus = np.maximum(-z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    loss = float(np.mean(sw * (softplus + (1.0 - y) * z)))
    loss += 0.5 * l2 * float(w @ w)
    residual = sw * (sigmoid(z) - y)
    grad_w = X.T @ residual / X.shape[0] + l2 * w
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


class LogisticRegression(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        learning_rate: float = 0.1,
        epochs: int = 20,
        l2: float = 1e-4,
        batch_size: int = 4096,
        class_weighting: bool = False,
        random_state: int = 0,
    ):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2
        self.batch_size = batch_size
        self.class_weighting = class_weighting
        self.random_state = random_state

    def fit(self, X, y) -> "LogisticRegression":
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        X, y = _validate_xy(X, y)
        n, d = X.shape
        n_pos = int(y.sum())
        if n_pos == 0 or n_pos == n:
            raise FitError("training data contains a single class")
        pos_weight = (n - n_pos) / n_pos if self.class_weighting else 1.0
        w = np.zeros(d, np.float64)
        b = 0.0
        self.loss_history_ = []
        for epoch in range(self.epochs):
            perm = rng.stream(self.random_state, rng.STREAM_EPOCH, epoch).permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch_size):
                sel = perm[start:start + self.batch_size]
                loss, gw, gb = logistic_loss_grad(
                    w, b, X[sel], y[sel], self.l2, pos_weight
                )
                w -= self.learning_rate * gw
                b -= self.learning_rate * gb
                epoch_loss += loss * sel.shape[0]
            epoch_loss /= n
            if not (np.isfinite(epoch_loss) and np.isfinite(w).all() and np.isfinite(b)):
                raise TrainingDivergedError(epoch)
            self.loss_history_.append(epoch_loss)
        self.coef_ = w
        self.intercept_ = b
        self.n_features_in_ = d
        self.classes_ = np.array([0, 1])
        return self

    def _check_matrix(self, X) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise FitError("model is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise SchemaError(
                f"expected (n, {self.n_features_in_}) feature matrix"
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_matrix(X)
        p1 = sigmoid(X @ self.coef_ + self.intercept_)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= threshold).astype(np.int8)
