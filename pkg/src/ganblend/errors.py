"""Exception taxonomy for the toolkit.

Everything raised on purpose derives from GanblendError so the CLI can
catch one type and turn it into an `error:` line with exit code 1.
"""


class GanblendError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(GanblendError):
    """Tensor rank or dimension mismatch."""


class NumericsError(GanblendError):
    """Non-finite values where finite ones are required."""


class GrammarError(GanblendError):
    """Parameter name does not match the naming grammar."""


class ConfigError(GanblendError):
    """Invalid or mismatched generator configuration."""


class FormatError(GanblendError):
    """Malformed GWTC or PNG byte stream."""


class BadMagicError(FormatError):
    """Container does not start with the GWTC magic."""


class UnsupportedVersionError(FormatError):
    """Container version is not one this build understands."""


class TruncatedFileError(FormatError):
    """Container ends before its declared contents do."""


class ManifestError(FormatError):
    """Parameter set disagrees with the architecture manifest."""


class ScheduleError(GanblendError):
    """Invalid blend schedule or lookup miss."""


class NotFoundError(GanblendError):
    """Registry lookup for an unknown model id."""


class ProjectionError(GanblendError):
    """Projection aborted: bad dimensions or non-finite loss."""
