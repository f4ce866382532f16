"""Exception hierarchy shared by every module of the package."""


class FlowError(Exception):
    """Base class for all errors raised by spaceform_flows."""


class DomainError(FlowError, ValueError):
    """A coordinate or evaluation point lies outside the admissible domain."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class SingularChartError(FlowError, ValueError):
    """Evaluation at the origin of a polar chart, where the frame degenerates."""


class ChartMismatchError(FlowError, ValueError):
    """An operation was requested on a chart that does not support it."""


class PreconditionError(FlowError, ValueError):
    """Parameters violate the hypotheses an operation relies on."""


class SingularApproachError(FlowError, ArithmeticError):
    """Step size underflow while integrating towards a singular point."""

    def __init__(self, message, last_t):
        super().__init__(message)
        self.last_t = last_t


class NonConvergence(FlowError, ArithmeticError):
    """A Taylor expansion failed its truncation test at the maximum order."""
