"""Exception hierarchy shared by all radpde modules."""


class RadpdeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidStep(RadpdeError):
    pass


class NonPositiveWarping(RadpdeError):
    pass


class OutOfDomain(RadpdeError):
    pass


class NotSubcritical(RadpdeError):
    pass


class Inconclusive(RadpdeError):
    pass


class UnsupportedAlpha(RadpdeError):
    pass


class NonPositiveQuotient(RadpdeError):
    pass


class MassExceeded(RadpdeError):
    pass


class UnsupportedExponent(RadpdeError):
    pass


class SingularPotential(RadpdeError):
    pass


class NonPositiveG(RadpdeError):
    pass


class UnboundedRatio(RadpdeError):
    pass


class NoInteriorDof(RadpdeError):
    pass


class NotCoercive(RadpdeError):
    pass


class NonConvergence(RadpdeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class DeltaViolated(RadpdeError):
    pass


class LadderStall(RadpdeError):
    pass


class DimensionTooLow(RadpdeError):
    pass


class ConfigError(RadpdeError):
    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
