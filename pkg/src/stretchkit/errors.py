"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised for invalid parameters, shapes, or settings."""


class AudioIOError(RuntimeError):
    """Raised when an audio file cannot be read or written."""
