"""Exception types shared across the package."""


class Gl2Error(Exception):
    """Base class for all errors raised by gl2lab."""


class ModulusMismatch(Gl2Error):
    pass


class NotInvertible(Gl2Error):
    pass


class NonCoprimeModuli(Gl2Error):
    pass


class NotADivisor(Gl2Error):
    pass


class CapExceeded(Gl2Error):
    """A closure or search blew past its configured element cap.

    Carries the partial count seen so far in .count.
    """

    def __init__(self, msg, count=None):
        super().__init__(msg)
        self.count = count


class PreconditionViolated(Gl2Error):
    pass


class IntegralityFailure(Gl2Error):
    """The genus formula came out non-integral: an implementation bug, not bad input."""


class PointNotOnCurve(Gl2Error):
    pass


class SingularCurve(Gl2Error):
    pass


class ZeroTwist(Gl2Error):
    pass


class KernelNotOrder2(Gl2Error):
    pass


class BoundExceeded(Gl2Error):
    pass


class BasisMismatch(Gl2Error):
    pass


class ParseError(Gl2Error):
    def __init__(self, msg, line_no=None):
        if line_no is not None:
            msg = "line %d: %s" % (line_no, msg)
        super().__init__(msg)
        self.line_no = line_no


class ValidationError(Gl2Error):
    def __init__(self, msg, failures=()):
        super().__init__(msg)
        self.failures = list(failures)


class UnknownPrime(Gl2Error):
    pass


class MissingCurveData(Gl2Error):
    pass
