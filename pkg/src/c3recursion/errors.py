"""Exception hierarchy shared by every layer of the engine."""


class C3Error(Exception):
    """Base class for all engine errors."""


class FramingModeError(C3Error, TypeError):
    """Scalars from different framing modes were combined."""


class GenericityError(C3Error, ValueError):
    """A framing value in {0, -1} was requested."""


class EvaluationError(C3Error, ZeroDivisionError):
    """Substituting a framing value hit a pole."""


class DomainError(C3Error, ValueError):
    """An argument lies outside the domain of an operation (unstable (g, n), g < 2, ...)."""


class PrecisionError(C3Error, ArithmeticError):
    """A coefficient was requested beyond the truncation order of a series."""


class SingularSeriesError(C3Error, ZeroDivisionError):
    """Inverting a series whose leading coefficient vanishes."""


class CompositionError(C3Error, ValueError):
    """Series composition with an inner series of invalid valuation."""


class ReversionError(C3Error, ValueError):
    """Series reversion of a series that is not of valuation exactly one."""


class LogarithmicTermError(C3Error, ValueError):
    """Antiderivative of a series with a non-zero u^-1 coefficient."""


class DegenerateRamificationError(C3Error, ArithmeticError):
    """The quadratic coefficient of the branch potential vanishes."""


class DecompositionError(C3Error, ArithmeticError):
    """A correlator does not lie in the span of the zeta basis."""
