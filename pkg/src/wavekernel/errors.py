"""Exception hierarchy shared across the package."""


class WavekernelError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(WavekernelError):
    """Input data is malformed (non-finite values, too short, ...)."""


class ShapeError(WavekernelError):
    """Array lengths or pyramid structure are inconsistent."""


class LevelError(WavekernelError):
    """Requested decomposition levels are out of range."""


class InsufficientHistoryError(WavekernelError):
    """Not enough past segments to form a prediction."""


class ConfigError(WavekernelError):
    """Invalid configuration (bad bandwidth, empty grid, bad CLI flags)."""
