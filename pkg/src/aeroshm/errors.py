"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, IntegrityError -> 3,
NumericalError -> 4.
"""


class AeroShmError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AeroShmError):
    """Invalid configuration value, schema violation, or unusable input."""


class IntegrityError(AeroShmError):
    """Persisted artifact is corrupt or has an unknown format."""


class NumericalError(AeroShmError):
    """A numerical procedure failed (divergence, singularity, ill-conditioning)."""
