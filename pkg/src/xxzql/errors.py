"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid parameter combination (bad l/m, unknown kind, malformed input)."""


class SizeCapError(ConfigError):
    """Requested chain length exceeds the dense-matrix cap."""


class SpectralPointError(ConfigError):
    """Spectral parameter sits on a singular point of the requested construction."""


class DomainError(ConfigError):
    """Point lies outside the domain where the requested quantity is defined."""


class AccuracyError(RuntimeError):
    """An iterative/adaptive scheme stopped before reaching the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved
