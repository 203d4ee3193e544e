"""Exception types raised across the package.

Plain I/O failures (missing files, unwritable paths) surface as the
builtin OSError family; everything domain-specific derives from DubaError.
"""


class DubaError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(DubaError):
    """Unsupported or undecodable image format, or a refused lossy target."""


class DimensionError(DubaError):
    """Image dimensions violate a size or divisibility requirement."""


class ShapeError(DubaError):
    """Operands whose array shapes are required to match do not."""


class NumericError(DubaError):
    """Non-finite data, or a transform left an unexpected numeric residue."""


class ConfigError(DubaError):
    """Invalid parameter value (profile fields, label maps, ratios)."""


class DatasetError(DubaError):
    """Dataset layout problems or per-file failures during poisoning."""


class VerificationError(DubaError):
    """Manifest replay could not even start (trigger missing or altered)."""
