"""
Exceptions raised by mmshare.

Configuration and computation errors are ``ValueError`` subclasses, so callers can catch the
precise class or fall back to ``ValueError``. ``OutputExists`` is a ``FileExistsError``, so
it is also an ``OSError``.
"""


class InvalidScenario(ValueError):
    """
    Raised when a scenario configuration breaks one or more invariants.

    Attributes
    ----------
    problems : list
        The individual violations (instances of the ``InvalidScenario`` subclasses). Holds only
        ``self`` when a single violation was raised directly.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems) if problems is not None else [self]


class NonPositiveParameter(InvalidScenario):
    """A parameter that must be positive (or non-negative) is not."""


class ChunkOverflow(InvalidScenario):
    """The licensed chunks do not fit in the total bandwidth."""


class FloorTooLarge(InvalidScenario):
    """The per-operator allocation floor times the number of operators exceeds one."""


class BadArrayShape(InvalidScenario):
    """An antenna array shape is not a pair of integers >= 1."""


class UnknownConfigKey(InvalidScenario):
    """A configuration file or override names a field that does not exist."""


class DegenerateTrial(ValueError):
    """The typical operator drew no gNBs, so the typical UE cannot be served."""


class NonPositiveDistance(ValueError):
    """A link distance is zero or negative."""


class OutageLink(ValueError):
    """A path loss was requested for a link in outage."""


class OutageServingLink(ValueError):
    """An SINR was requested for a serving link in outage."""


class ZeroUsers(ValueError):
    """A throughput was requested for an active gNB with no associated users."""


class EmptyInput(ValueError):
    """A statistic was requested over no samples."""


class AllZero(ValueError):
    """The Jain index is undefined when every value is zero."""


class AngleOutOfRange(ValueError):
    """An angle lies outside the range of the element radiation pattern."""


class BadDensityList(ValueError):
    """A density sweep list is empty, unparseable or holds non-positive values."""


class OutputExists(FileExistsError):
    """A result file already exists and overwriting was not requested."""
