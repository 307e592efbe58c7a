"""Exception hierarchy shared by all tvaudit modules."""


class TvauditError(Exception):
    """Base class for every error raised by the toolkit."""


class OutOfDomainYear(TvauditError, ValueError):
    pass


class NegativeCount(TvauditError, ValueError):
    pass


class DomainMismatch(TvauditError, ValueError):
    pass


class EmptyHistogram(TvauditError, ValueError):
    """Raised by single-histogram operations that divide by sqrt(N)."""


class EmptySublist(TvauditError, ValueError):
    pass


class InsufficientPoints(TvauditError, ValueError):
    pass


class SingularSystem(TvauditError, ArithmeticError):
    pass


class EmptyReference(TvauditError, ValueError):
    pass


class ZeroSigma(TvauditError, ArithmeticError):
    pass


class SizeMismatch(TvauditError, ValueError):
    pass


class NonpositiveExpectedScore(TvauditError, ArithmeticError):
    pass


class TooFewInWindow(TvauditError, ValueError):
    pass


class MissingKey(TvauditError, KeyError):
    pass


class InvalidDistribution(TvauditError, ValueError):
    pass


class InvalidParams(TvauditError, ValueError):
    pass


class IngestionError(TvauditError):
    """A list file could not be read or parsed."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
