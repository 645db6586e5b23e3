"""Exception hierarchy shared by all zetadyn modules."""


class ZetadynError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class EvalError(ZetadynError):
    pass


class PoleHit(EvalError):
    pass


class PoleAt1(PoleHit):
    pass


class AccuracyUnreachable(EvalError):
    pass


class OverflowDomain(EvalError):
    pass


class MissedZeroSuspected(ZetadynError):
    def __init__(self, message, found=None, expected=None):
        super().__init__(message)
        self.found = found
        self.expected = expected


class FormatError(ZetadynError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotAFixedPoint(ZetadynError):
    pass


class OrderUndetermined(ZetadynError):
    pass


class MapPole(ZetadynError):
    pass


class QuadratureNonConvergent(ZetadynError):
    pass


class IntervalTooWide(ZetadynError):
    pass


class ZeroUnavailable(ZetadynError):
    pass


class BudgetExceeded(ZetadynError):
    pass
