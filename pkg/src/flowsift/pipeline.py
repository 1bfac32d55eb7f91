"""Scoring bundles: fitted preprocessing plus a model, as versioned JSON.

File format (documented in README): a JSON object with
``magic: "flowsift-model"``, ``version: 1``, a ``kind`` tag
(logistic | tree | forest), the fitted feature ``schema``, the
``standardizer`` (present only for logistic bundles — tree pipelines never
scale), a kind-specific ``model`` payload, and free-form ``meta``.
Round-trip is exact: floats serialize via shortest-repr and a loaded
bundle scores every input identically to the original.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelFormatError, SchemaError
from .features import (
    FeatureSchema,
    FeatureStandardizer,
    FlowArrays,
    transform_arrays,
)
from .forest import RandomForestClassifier
from .linear import LogisticRegression
from .tree import DecisionTreeClassifier, TreeArrays

MAGIC = "flowsift-model"
VERSION = 1

MODEL_KINDS = {"lr": "logistic", "dt": "tree", "rf": "forest"}


def _tree_to_dict(t: TreeArrays) -> dict:
    return {
        "feature": t.feature.tolist(),
        "threshold": t.threshold.tolist(),
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "leaf_value": t.leaf_value.tolist(),
        "n_samples": t.n_samples.tolist(),
    }


def _tree_from_dict(d: dict) -> TreeArrays:
    return TreeArrays(
        feature=np.asarray(d["feature"], np.int32),
        threshold=np.asarray(d["threshold"], np.float64),
        left=np.asarray(d["left"], np.int32),
        right=np.asarray(d["right"], np.int32),
        leaf_value=np.asarray(d["leaf_value"], np.float64),
        n_samples=np.asarray(d["n_samples"], np.int64),
    )


def _model_to_dict(model) -> tuple[str, dict]:
    if isinstance(model, LogisticRegression):
        return "logistic", {
            "weights": model.coef_.tolist(),
            "bias": model.intercept_,
            "config": {
                "learning_rate": model.learning_rate,
                "epochs": model.epochs,
                "l2": model.l2,
                "batch_size": model.batch_size,
                "class_weighting": model.class_weighting,
                "random_state": model.random_state,
            },
        }
    if isinstance(model, DecisionTreeClassifier):
        return "tree", {
            "config": {
                "max_depth": model.max_depth,
                "min_samples_split": model.min_samples_split,
                "min_samples_leaf": model.min_samples_leaf,
                "feature_subsample": model.feature_subsample,
                "random_state": model.random_state,
            },
            "n_features": model.n_features_in_,
            "nodes": _tree_to_dict(model.tree_),
        }
    if isinstance(model, RandomForestClassifier):
        return "forest", {
            "config": {
                "n_estimators": model.n_estimators,
                "max_depth": model.max_depth,
                "min_samples_split": model.min_samples_split,
                "min_samples_leaf": model.min_samples_leaf,
                "bootstrap": model.bootstrap,
                "random_state": model.random_state,
            },
            "feature_subsample": model.feature_subsample_,
            "seed": model.random_state,
            "n_features": model.n_features_in_,
            "trees": [_tree_to_dict(t) for t in model.trees_],
        }
    raise ModelFormatError(f"unsupported model type {type(model).__name__}")


def _model_from_dict(kind: str, d: dict):
    try:
        if kind == "logistic":
            model = LogisticRegression(**d["config"])
            model.coef_ = np.asarray(d["weights"], np.float64)
            model.intercept_ = float(d["bias"])
            model.n_features_in_ = model.coef_.shape[0]
            model.classes_ = np.array([0, 1])
            return model
        if kind == "tree":
            model = DecisionTreeClassifier(**d["config"])
            model.tree_ = _tree_from_dict(d["nodes"])
            model.n_features_in_ = int(d["n_features"])
            model.node_count_ = model.tree_.feature.shape[0]
            model.classes_ = np.array([0, 1])
            return model
        if kind == "forest":
            model = RandomForestClassifier(**d["config"])
            model.trees_ = [_tree_from_dict(t) for t in d["trees"]]
            model.n_features_in_ = int(d["n_features"])
            model.feature_subsample_ = int(d["feature_subsample"])
            model.classes_ = np.array([0, 1])
            model._flatten()
            return model
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt {kind} model payload: {exc}") from exc
    raise ModelFormatError(f"unknown model kind {kind!r}")


@dataclass
class FlowPipeline:
    """Fitted featurizer schema, optional standardizer, and a model."""

    schema: FeatureSchema
    standardizer: FeatureStandardizer | None
    model: object
    meta: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return _model_to_dict(self.model)[0]

    def matrix(self, arrays: FlowArrays) -> np.ndarray:
        """Model-input matrix for a flow batch (standardized when fitted
        with a standardizer, i.e. for the logistic pipeline only)."""
        X = transform_arrays(arrays, self.schema)
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return X

    def score_arrays(self, arrays: FlowArrays) -> np.ndarray:
        return self.model.predict_proba(self.matrix(arrays))[:, 1]

    def score_matrix(self, X_raw: np.ndarray) -> np.ndarray:
        """Score an already-extracted (unscaled) feature matrix."""
        X = X_raw
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return self.model.predict_proba(X)[:, 1]

    def save(self) -> bytes:
        kind, payload = _model_to_dict(self.model)
        doc = {
            "magic": MAGIC,
            "version": VERSION,
            "kind": kind,
            "schema": self.schema.to_dict(),
            "standardizer": (
                None if self.standardizer is None else self.standardizer.to_dict()
            ),
            "model": payload,
            "meta": self.meta,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    def save_to(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as fh:
            fh.write(self.save())

    @classmethod
    def load(cls, blob: bytes) -> "FlowPipeline":
        try:
            doc = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelFormatError(f"not a flowsift model file: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("magic") != MAGIC:
            raise ModelFormatError("missing flowsift-model magic")
        if doc.get("version") != VERSION:
            raise ModelFormatError(
                f"unsupported model version {doc.get('version')!r}"
            )
        try:
            schema = FeatureSchema.from_dict(doc["schema"])
            std = doc["standardizer"]
            standardizer = None if std is None else FeatureStandardizer.from_dict(std)
            model = _model_from_dict(doc["kind"], doc["model"])
        except KeyError as exc:
            raise ModelFormatError(f"missing field {exc}") from exc
        if getattr(model, "n_features_in_", None) != len(schema.feature_names):
            raise SchemaError("model width disagrees with embedded schema")
        return cls(
            schema=schema,
            standardizer=standardizer,
            model=model,
            meta=doc.get("meta", {}),
        )

    @classmethod
    def load_from(cls, path: str | os.PathLike) -> "FlowPipeline":
        with open(path, "rb") as fh:
            return cls.load(fh.read())


def save_model(pipeline: FlowPipeline) -> bytes:
    return pipeline.save()


def load_model(blob: bytes) -> FlowPipeline:
    return FlowPipeline.load(blob)
