"""Exception hierarchy shared by all sfl modules."""


class SflError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(SflError):
    pass


class NotSublattice(SflError):
    pass


class NotInvariant(SflError):
    pass


class NoInvariantLattice(SflError):
    pass


class RankDeficient(SflError):
    pass


class NotSquare(SflError):
    pass


class Unclassified(SflError):
    pass


class InternalError(SflError):
    pass


class MissingLattice(SflError):
    pass


class Indeterminate(SflError):
    pass


class NotSimilarity(SflError):
    pass


class BudgetExceeded(SflError):
    def __init__(self, message, admissible_depth=None):
        super().__init__(message)
        self.admissible_depth = admissible_depth


class BadViewport(SflError):
    pass


class DomainViolation(SflError):
    pass


class NotFound(SflError):
    pass


class ParseError(SflError):
    pass
