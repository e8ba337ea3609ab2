"""Exception types raised across the package."""


class BeamPredictError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BeamPredictError, ValueError):
    pass


class EmptyPathList(BeamPredictError, ValueError):
    pass


class DegenerateGeometry(BeamPredictError, ValueError):
    pass


class EmptyDataset(BeamPredictError, ValueError):
    pass


class DegenerateNorms(BeamPredictError, ValueError):
    pass


class EmptyBatch(BeamPredictError, ValueError):
    pass


class DivergenceDetected(BeamPredictError, FloatingPointError):
    pass


class InsufficientData(BeamPredictError, ValueError):
    pass


class InsufficientSamples(BeamPredictError, ValueError):
    pass


class EmptyDistribution(BeamPredictError, ValueError):
    pass


class DegenerateLabels(BeamPredictError, ValueError):
    pass


class ConfigError(BeamPredictError, ValueError):
    """Invalid configuration document; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
