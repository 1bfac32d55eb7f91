"""flowsift: lightweight botnet detection over NetFlow-style flow records.

Pipeline: ingest binetflow CSVs -> extract interpretable flow features ->
seeded stratified split -> train logistic regression / CART tree / random
forest (all implemented here) -> evaluate with imbalance-aware metrics
(average precision, ROC-AUC, threshold sweeps, permutation importance).
"""

from .errors import (
    ConfigError,
    FitError,
    FlowsiftError,
    MetricError,
    ModelFormatError,
    SchemaError,
    StratificationError,
    TrainingDivergedError,
)
from .features import (
    CONTINUOUS_FEATURES,
    FEATURE_NAMES,
    FeatureSchema,
    FeatureStandardizer,
    FlowArrays,
    FlowFeaturizer,
    extract_features,
    fit_schema,
    port_bucket,
    transform_arrays,
)
from .flows import Label, RawFlow, parse_label
from .forest import RandomForestClassifier
from .importance import ImportanceReport, permutation_importance
from .ingest import BINETFLOW_COLUMNS, FlowReader, IngestStats, parse_port, read_flows
from .linear import LogisticRegression, logistic_loss_grad, sigmoid
from .metrics import (
    ConfusionMatrix,
    Curve,
    EvalReport,
    average_precision,
    classify,
    evaluate_scores,
    f1,
    pr_curve,
    precision,
    prevalence,
    recall,
    roc_auc,
    roc_curve,
    threshold_sweep,
)
from .pipeline import FlowPipeline, load_model, save_model
from .split import SplitSpec, read_split_csv, stratified_split, write_split_csv
from .synth import SynthConfig, generate, write_csv
from .tree import DecisionTreeClassifier, Split, best_split, gini

__version__ = "0.1.0"

__all__ = [
    "BINETFLOW_COLUMNS",
    "CONTINUOUS_FEATURES",
    "ConfigError",
    "ConfusionMatrix",
    "Curve",
    "DecisionTreeClassifier",
    "EvalReport",
    "FEATURE_NAMES",
    "FeatureSchema",
    "FeatureStandardizer",
    "FitError",
    "FlowArrays",
    "FlowFeaturizer",
    "FlowPipeline",
    "FlowReader",
    "FlowsiftError",
    "ImportanceReport",
    "IngestStats",
    "Label",
    "LogisticRegression",
    "MetricError",
    "ModelFormatError",
    "RandomForestClassifier",
    "RawFlow",
    "SchemaError",
    "Split",
    "SplitSpec",
    "StratificationError",
    "SynthConfig",
    "TrainingDivergedError",
    "average_precision",
    "best_split",
    "classify",
    "evaluate_scores",
    "extract_features",
    "f1",
    "fit_schema",
    "generate",
    "gini",
    "load_model",
    "logistic_loss_grad",
    "parse_label",
    "parse_port",
    "permutation_importance",
    "port_bucket",
    "pr_curve",
    "precision",
    "prevalence",
    "read_flows",
    "read_split_csv",
    "recall",
    "roc_auc",
    "roc_curve",
    "save_model",
    "sigmoid",
    "stratified_split",
    "threshold_sweep",
    "transform_arrays",
    "write_csv",
    "write_split_csv",
]
