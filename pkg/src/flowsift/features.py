"""Interpretable flow features with fitted encoder state.

The feature vector has a fixed order (``FEATURE_NAMES``). Heavy-tailed
volume quantities enter as log1p transforms; byte-direction share and
bytes-per-packet capture traffic shape; protocol is label-encoded against
the training vocabulary; ports contribute both raw values and coarse
buckets. Only the five continuous features are ever standardized, and only
for the logistic model — tree models consume the raw matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import FitError, SchemaError
from .flows import Label, RawFlow

FEATURE_NAMES = (
    "log1p_totbytes",
    "log1p_totpkts",
    "log1p_bytes_per_pkt",
    "log1p_duration",
    "src_to_tot_bytes",
    "protocol_code",
    "src_port_bucket",
    "dst_port_bucket",
    "src_port",
    "dst_port",
)

#: Columns the standardizer may rescale; the rest are categorical codes,
#: buckets, or sentinel-bearing raw ports and always pass through unscaled.
CONTINUOUS_FEATURES = (0, 1, 2, 3, 4)

STD_EPSILON = 1e-9

#: Raw-port sentinel for flows without ports (e.g. ICMP).
MISSING_PORT = -1

BUCKET_WELL_KNOWN = 0
BUCKET_REGISTERED = 1
BUCKET_EPHEMERAL = 2
BUCKET_MISSING = 3


def port_bucket(port: int | None) -> int:
    """Bucket a port: well-known <1024, registered 1024-49151, ephemeral >=49152.

    Missing ports get their own bucket (3) rather than dropping the flow;
    port-less protocols are legitimate traffic.
    """
    if port is None:
        return BUCKET_MISSING
    if port < 1024:
        return BUCKET_WELL_KNOWN
    if port <= 49151:
        return BUCKET_REGISTERED
    return BUCKET_EPHEMERAL


@dataclass(frozen=True)
class FeatureSchema:
    """Fitted encoder state: feature order plus the protocol vocabulary."""

    protocol_codes: dict[str, int]
    unknown_protocol_code: int
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def protocol_code(self, token: str) -> int:
        return self.protocol_codes.get(token, self.unknown_protocol_code)

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "protocol_codes": dict(sorted(self.protocol_codes.items())),
            "unknown_protocol_code": self.unknown_protocol_code,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSchema":
        return cls(
            protocol_codes={str(k): int(v) for k, v in d["protocol_codes"].items()},
            unknown_protocol_code=int(d["unknown_protocol_code"]),
            feature_names=tuple(d["feature_names"]),
        )


@dataclass
class FlowArrays:
    """Columnar view of a flow batch; the vectorized featurization input.

    Missing ports are stored as ``MISSING_PORT``.
    """

    duration: np.ndarray
    tot_pkts: np.ndarray
    tot_bytes: np.ndarray
    src_bytes: np.ndarray
    protocol: list[str]
    src_port: np.ndarray
    dst_port: np.ndarray

    def __len__(self) -> int:
        return self.duration.shape[0]

    def subset(self, indices: np.ndarray) -> "FlowArrays":
        return FlowArrays(
            duration=self.duration[indices],
            tot_pkts=self.tot_pkts[indices],
            tot_bytes=self.tot_bytes[indices],
            src_bytes=self.src_bytes[indices],
            protocol=[self.protocol[i] for i in indices],
            src_port=self.src_port[indices],
            dst_port=self.dst_port[indices],
        )

    @classmethod
    def from_flows(cls, flows: Sequence[RawFlow]) -> "FlowArrays":
        n = len(flows)
        duration = np.empty(n, np.float64)
        tot_pkts = np.empty(n, np.int64)
        tot_bytes = np.empty(n, np.int64)
        src_bytes = np.empty(n, np.int64)
        src_port = np.empty(n, np.int32)
        dst_port = np.empty(n, np.int32)
        protocol: list[str] = []
        for i, f in enumerate(flows):
            duration[i] = f.duration
            tot_pkts[i] = f.tot_pkts
            tot_bytes[i] = f.tot_bytes
            src_bytes[i] = f.src_bytes
            src_port[i] = MISSING_PORT if f.src_port is None else f.src_port
            dst_port[i] = MISSING_PORT if f.dst_port is None else f.dst_port
            protocol.append(f.protocol)
        return cls(duration, tot_pkts, tot_bytes, src_bytes, protocol, src_port, dst_port)

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[RawFlow, Label]]
    ) -> tuple["FlowArrays", np.ndarray]:
        """Collect a (flow, label) stream into arrays plus a 0/1 label vector."""
        flows: list[RawFlow] = []
        labels: list[int] = []
        for flow, label in pairs:
            flows.append(flow)
            labels.append(int(label))
        return cls.from_flows(flows), np.asarray(labels, dtype=np.int8)


def fit_schema(flows: Iterable[RawFlow] | FlowArrays) -> FeatureSchema:
    """Learn the protocol vocabulary from training flows.

    Codes are assigned 0..n-1 over the lexicographically sorted distinct
    protocol tokens; unseen tokens at transform time map to code n.
    """
    if isinstance(flows, FlowArrays):
        tokens = set(flows.protocol)
    else:
        tokens = {f.protocol for f in flows}
    if not tokens:
        raise FitError("cannot fit a feature schema on an empty flow stream")
    codes = {tok: i for i, tok in enumerate(sorted(tokens))}
    return FeatureSchema(protocol_codes=codes, unknown_protocol_code=len(codes))


def extract_features(flow: RawFlow, schema: FeatureSchema) -> np.ndarray:
    """Feature vector for one flow; pure, and finite for ingestion-clean flows."""
    bytes_per_pkt = flow.tot_bytes / max(flow.tot_pkts, 1)
    return np.array(
        [
            math.log1p(flow.tot_bytes),
            math.log1p(flow.tot_pkts),
            math.log1p(bytes_per_pkt),
            math.log1p(flow.duration),
            flow.src_bytes / max(flow.tot_bytes, 1),
            schema.protocol_code(flow.protocol),
            port_bucket(flow.src_port),
            port_bucket(flow.dst_port),
            MISSING_PORT if flow.src_port is None else flow.src_port,
            MISSING_PORT if flow.dst_port is None else flow.dst_port,
        ],
        dtype=np.float64,
    )


def _bucket_array(ports: np.ndarray) -> np.ndarray:
    out = np.full(ports.shape, BUCKET_REGISTERED, np.float64)
    out[ports < 1024] = BUCKET_WELL_KNOWN
    out[ports >= 49152] = BUCKET_EPHEMERAL
    out[ports == MISSING_PORT] = BUCKET_MISSING
    return out


class FlowFeaturizer(BaseEstimator, TransformerMixin):
    """Turns flows into the fixed-order numeric feature matrix.

    ``fit`` learns the protocol vocabulary (training split only); the
    fitted state is exposed as ``schema_`` and is immutable afterwards.
    """

    def fit(self, X: Sequence[RawFlow] | FlowArrays, y=None) -> "FlowFeaturizer":
        self.schema_: FeatureSchema = fit_schema(X)
        return self

    def transform(self, X: Sequence[RawFlow] | FlowArrays) -> np.ndarray:
        if not hasattr(self, "schema_"):
            raise FitError("FlowFeaturizer.transform called before fit")
        arrays = X if isinstance(X, FlowArrays) else FlowArrays.from_flows(list(X))
        return transform_arrays(arrays, self.schema_)


def transform_arrays(arrays: FlowArrays, schema: FeatureSchema) -> np.ndarray:
    """Vectorized equivalent of per-flow :func:`extract_features`."""
    n = len(arrays)
    out = np.empty((n, len(schema.feature_names)), np.float64)
    tot_bytes = arrays.tot_bytes.astype(np.float64)
    tot_pkts = arrays.tot_pkts.astype(np.float64)
    bytes_per_pkt = tot_bytes / np.maximum(tot_pkts, 1.0)
    out[:, 0] = np.log1p(tot_bytes)
    out[:, 1] = np.log1p(tot_pkts)
    out[:, 2] = np.log1p(bytes_per_pkt)
    out[:, 3] = np.log1p(arrays.duration)
    out[:, 4] = arrays.src_bytes / np.maximum(tot_bytes, 1.0)
    codes = schema.protocol_codes
    unknown = schema.unknown_protocol_code
    out[:, 5] = [codes.get(p, unknown) for p in arrays.protocol]
    out[:, 6] = _bucket_array(arrays.src_port)
    out[:, 7] = _bucket_array(arrays.dst_port)
    out[:, 8] = arrays.src_port
    out[:, 9] = arrays.dst_port
    return out


class FeatureStandardizer(BaseEstimator, TransformerMixin):
    """Zero-mean unit-variance scaling of the continuous feature columns.

    Population standard deviation, floored at ``STD_EPSILON`` so constant
    columns map to zero instead of dividing by zero. Categorical, bucket
    and sentinel columns are passed through untouched. Fit on the training
    split only.
    """

    def __init__(self, continuous: tuple[int, ...] = CONTINUOUS_FEATURES):
        self.continuous = continuous

    def fit(self, X: np.ndarray, y=None) -> "FeatureStandardizer":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise FitError("standardizer requires a non-empty 2-D matrix")
        self.means_ = np.zeros(X.shape[1], np.float64)
        self.stds_ = np.ones(X.shape[1], np.float64)
        cols = list(self.continuous)
        self.means_[cols] = X[:, cols].mean(axis=0)
        self.stds_[cols] = np.maximum(X[:, cols].std(axis=0), STD_EPSILON)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if not hasattr(self, "means_"):
            raise FitError("FeatureStandardizer.transform called before fit")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return (X - self.means_) / self.stds_
        if X.shape[1] != self.means_.shape[0]:
            raise SchemaError(
                f"expected {self.means_.shape[0]} features, got {X.shape[1]}"
            )
        return (X - self.means_) / self.stds_

    def to_dict(self) -> dict:
        return {
            "continuous": list(self.continuous),
            "means": self.means_.tolist(),
            "stds": self.stds_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureStandardizer":
        obj = cls(continuous=tuple(d["continuous"]))
        obj.means_ = np.asarray(d["means"], np.float64)
        obj.stds_ = np.asarray(d["stds"], np.float64)
        return obj
