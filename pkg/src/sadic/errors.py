"""Exception types raised across the package."""


class SadicError(Exception):
    """Base class for every error raised by :mod:`sadic`."""


class InvalidParameters(SadicError, ValueError):
    """A parameter triple or substitution violates its invariant."""


class AlphabetMismatch(SadicError, ValueError):
    pass


class CommonRootError(SadicError, ValueError):
    """The two seed words are powers of one common word."""


class NotAFactor(SadicError, ValueError):
    pass


class AmbiguousParse(SadicError, ValueError):
    pass


class BudgetExceeded(SadicError, MemoryError):
    """Materializing a word would exceed the configured byte budget."""


class InsufficientDepth(SadicError):
    pass


class PeriodicInput(SadicError, ValueError):
    pass


class NotLowComplexity(SadicError, ValueError):
    pass


class NonPrimitive(SadicError, ValueError):
    pass


class PrecisionInsufficient(SadicError, ValueError):
    pass
