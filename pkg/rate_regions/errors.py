class RateRegionError(ValueError):
    "Base class of user-facing failures."


class ParseError(RateRegionError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class FourierMotzkinOverflow(RateRegionError):
    pass


class InfeasibleSystem(RateRegionError):
    "Raised when an eliminated system has no solution."


class UnboundedRegion(RateRegionError):
    "Raised when a 2-D system lacks a bound in some nonnegative direction."


class NumericalDegeneracyError(RateRegionError):
    pass


class PowerConstraintError(RateRegionError):
    pass


class NegativeBinningRate(RateRegionError):
    pass


class UnknownTemplate(RateRegionError):
    pass


class UsageError(RateRegionError):
    "Bad command-line option value."
