"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific type that applies.
"""


class MrCorrError(Exception):
    """Base class for package errors."""


class DataError(MrCorrError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericError(MrCorrError):
    """Numerical failure inside a sampler or decomposition."""
