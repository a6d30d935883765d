"""Exception types shared across the package."""


class PositreeError(Exception):
    """Base class for all errors raised by this package."""


class DepthExceeded(PositreeError):
    """A bit string is longer than the resolution of the tree (or the
    configured maximum depth)."""


class NoSuchLevel(PositreeError):
    """No level of the tree holds the requested number of nodes."""


class InvalidEpsilon(PositreeError):
    """A pruning budget must be strictly positive."""


class EmptyAfterPruning(PositreeError):
    """Pruning removed the whole tree.  Carries the prune report."""

    def __init__(self, report):
        super().__init__("pruning removed every leaf")
        self.report = report


class MeasureTooSmall(PositreeError):
    """The surviving measure is too small to pick a positive margin."""


class ScheduleExceedsDepth(PositreeError):
    """The requested schedule level lies beyond the tree's resolution."""


class ScheduleTooCoarse(PositreeError):
    """Even the first splitting level exceeds the tree's resolution."""


class NoHomogeneousTree(PositreeError):
    """No color admits a monochromatic perfect embedding at this depth."""


class OutOfTable(PositreeError):
    """An index points past the end of a halting table."""


class InsufficientOnes(PositreeError):
    """The string does not carry enough ones to decode the table."""


class NotInC(PositreeError):
    """The string violates the sparseness constraint of the coded class."""


class EmptyCylinder(PositreeError):
    """The cylinder under the given string carries no measure."""


class InvalidCondition(PositreeError):
    """The pair (F, T) is not a valid forcing condition."""


class DichotomyGap(PositreeError):
    """Neither branch of the forcing step applies within the search bound.

    Cannot occur for the built-in functionals on valid conditions; raised
    instead of silently mislabeling the step."""


class EmptyTree(PositreeError):
    """The operation needs a tree of positive measure."""


class MeasureBelowDelta(PositreeError):
    """The tree's measure does not exceed the supplied lower bound."""


class UnknownVersion(PositreeError):
    """A serialized record carries an unsupported format tag."""


class MalformedCertificate(PositreeError):
    """The certificate is structurally broken."""


class MalformedInput(PositreeError):
    """A serialized tree/table/condition file cannot be parsed."""
