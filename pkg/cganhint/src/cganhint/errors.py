"""Error types for the hint trainer."""


class CganHintError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(CganHintError):
    """Invalid configuration: bad crop, resolution, or pair geometry."""
