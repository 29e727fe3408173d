"""Exception types shared across serieslab modules."""


class SerieslabError(Exception):
    """Base class for all serieslab errors."""


class InvalidArgumentError(SerieslabError, ValueError):
    """Malformed or out-of-contract argument."""


class UnsupportedSpaceError(SerieslabError):
    """Operation not defined for the given space model."""


class EmptySeriesError(SerieslabError):
    """The graded piece requested is zero-dimensional."""


class DegenerateGramError(SerieslabError):
    """Gram matrix is numerically singular beyond the jitter policy."""


class NotRadialError(SerieslabError):
    """A radial profile was requested for a weight that is not radial."""


class BaseLocusError(SerieslabError):
    """All sections vanish at the evaluation point; extremal problem infeasible."""


class DiscretizationError(SerieslabError):
    """A resolution-dependent check failed; grids are too coarse."""


class ConfigError(SerieslabError):
    """Experiment configuration is malformed."""


class InvalidEnvelopeError(SerieslabError):
    """A grid potential fails the convexity/slope contract of an envelope."""
