"""Exception hierarchy for the flowsift toolkit."""


class FlowsiftError(Exception):
    """Base class for all flowsift errors."""


class ConfigError(FlowsiftError):
    """Invalid configuration: missing columns, bad flag values, unreadable inputs."""


class FitError(FlowsiftError):
    """Fitting was attempted on data that cannot support it (empty, single-class)."""


class StratificationError(FitError):
    """A class is too small to appear in both sides of a stratified split."""


class TrainingDivergedError(FlowsiftError):
    """Optimization produced a non-finite loss."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training diverged: non-finite loss at epoch {epoch}")


class MetricError(FlowsiftError):
    """A metric was requested on inputs it is undefined for (e.g. single-class labels)."""


class SchemaError(FlowsiftError):
    """Feature schema mismatch between a model and the data it is applied to."""


class ModelFormatError(FlowsiftError):
    """Model payload is corrupt, has the wrong magic, or an unsupported version."""
