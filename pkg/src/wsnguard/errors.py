"""Exception hierarchy shared across the package."""


class WsnGuardError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WsnGuardError):
    """Invalid configuration value or malformed scenario/rule file."""


class NumericInputError(WsnGuardError):
    """A numeric input was NaN or infinite."""


class DimensionError(WsnGuardError):
    """Vector/matrix dimensions do not match the expected shape."""


class TopologyError(WsnGuardError):
    """Neighbor identities or ordering do not match the trained predictor."""


class TrainingError(WsnGuardError):
    """Neural network training failed; carries the partial report if any."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FormatError(WsnGuardError):
    """Corrupt, truncated or version-incompatible serialized artifact."""
