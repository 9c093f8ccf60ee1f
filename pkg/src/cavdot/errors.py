"""Exception types shared across the package."""


class CavdotError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(CavdotError, ValueError):
    """Operator/layout dimension mismatch or invalid level count."""


class DomainError(CavdotError, ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedLayoutError(CavdotError, ValueError):
    """Operation requires a layout property that does not hold (e.g. N_ph = 2)."""


class NumericBlowupError(CavdotError, RuntimeError):
    """NaN/Inf appeared during propagation."""

    def __init__(self, msg, t_fs=None, step=None):
        super().__init__(msg)
        self.t_fs = t_fs
        self.step = step


class CapacityError(CavdotError, MemoryError):
    """Estimated memory use exceeds the configured cap."""


class ConfigError(CavdotError, ValueError):
    """Scenario configuration could not be parsed/validated.

    ``key`` carries the offending key path when known.
    """

    def __init__(self, msg, key=None):
        super().__init__(msg if key is None else f"{key}: {msg}")
        self.key = key
