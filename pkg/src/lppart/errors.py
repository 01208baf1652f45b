"""Exception hierarchy shared across the package."""


class LppartError(Exception):
    """Base class for all package errors."""


class InputError(LppartError):
    """Malformed or out-of-range input data (edge lists, partition files)."""


class ConfigError(LppartError):
    """Invalid run configuration (part counts, task counts, ratios, iteration counts)."""


class ProtocolError(LppartError):
    """A simulated collective was misused (assertion-level failure, not user error)."""
