"""Error taxonomy shared across the package.

Every failure mode that callers are expected to handle gets its own class so
that CLI exit codes and tests can dispatch on type rather than message text.
"""


class PtvError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(PtvError):
    """An argument is outside its documented domain."""


class ChannelMismatch(PtvError):
    """Signal channel count does not match the kernel's input count."""


class RateMismatch(PtvError):
    """Two objects carry different physical sample periods."""


class DimensionMismatch(PtvError):
    """Connected systems have incompatible input/output dimensions."""


class IncommensurateRate(PtvError):
    """The kernel period is not an integer multiple of the sample period."""


class WindowTooSmall(PtvError):
    """Requested lag window leaves more tail energy than the tolerance allows."""


class GridTooSmall(PtvError):
    """A frequency grid is too short for the requested operation."""


class NotInvertible(PtvError):
    """The system's transfer matrix is singular or too ill-conditioned."""


class NotSiso(PtvError):
    """Operation requires a single-input single-output kernel."""


class NotSquare(PtvError):
    """Operation requires a square (inputs == outputs) kernel."""


class IndivisiblePeriod(PtvError):
    """Kernel period is not divisible by the requested channel count."""


class CyclicGraph(PtvError):
    """Circuit graph contains a cycle; only feed-forward topologies are supported."""


class IncommensuratePeriods(PtvError):
    """Circuit components cannot share a common sampling rate."""


class EmptySignal(PtvError):
    """Operation requires at least one sample."""
