"""Exception hierarchy.

Every domain failure derives from :class:`ApavoidError`; the CLI maps the
class name to a machine-readable error object and exit status 1.
"""


class ApavoidError(Exception):
    """Base class for domain errors."""


class Undecidable(ApavoidError):
    """An enclosure could not be refined far enough to settle a question."""


class UndecidableFloor(Undecidable):
    pass


class UndecidableBoundary(Undecidable):
    pass


class NotInSet(ApavoidError):
    pass


class ZeroGap(ApavoidError):
    pass


class MeasureTooLarge(ApavoidError):
    pass


class UnsupportedSpec(ApavoidError):
    pass


class PreconditionUnmet(ApavoidError):
    """Raised when checked hypotheses fail; the computed report is attached."""

    def __init__(self, failed, report=None):
        self.failed = list(failed)
        self.report = report
        super().__init__("unmet hypotheses: " + ", ".join(self.failed))
