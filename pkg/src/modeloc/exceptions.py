"""Exception types shared across the package.

Every error raised deliberately by this package derives from
:class:`ModeLocError` so callers can catch one base class.  The split
between "bad input" and "estimation failed on valid input" matters for
the command line tool, which maps the former to exit code 2 and the
latter to exit code 3.
"""


class ModeLocError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ModeLocError):
    """Base class for errors caused by invalid caller input."""


class EmptyInput(InputError):
    """An operation received an empty point set or value sequence."""


class InsufficientSamples(InputError):
    """Fewer samples than the operation's documented minimum."""


class BadParameter(InputError):
    """A parameter value is outside its documented domain."""


class UnsortedInput(InputError):
    """A sequence that must be sorted ascending was not."""


class MissingGroundTruth(InputError):
    """A target id present in the data has no ground-truth entry."""


class EstimationError(ModeLocError):
    """Base class for failures on structurally valid input."""


class SingularScatter(EstimationError):
    """A scatter matrix was numerically singular where an inverse is needed."""


class DegenerateData(EstimationError):
    """Data degeneracy prevented an estimate (e.g. all points collinear)."""


class PlacementFailed(EstimationError):
    """Rejection sampling could not place cluster centers within budget."""
