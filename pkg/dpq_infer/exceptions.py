import numpy as np


class DegenerateQueryError(ValueError):
    """Raised for an all-zero coefficient vector (its noise scale is undefined)."""


class ShapeError(ValueError):
    """Raised when vector lengths or row counts do not line up."""


class ContractError(ValueError):
    """Raised when a caller violates an operation's precondition."""


class ParseError(ValueError):
    """Raised for malformed cube, query, history or config files.

    Attributes:
        path: Source file name, or None for in-memory streams.
        lineno: 1-based line number of the offending record, or None.
    """

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        location = ""
        if path is not None:
            location += "{}".format(path)
        if lineno is not None:
            location += "{}line {}".format(":" if location else "", lineno)
        if location:
            message = "{}: {}".format(location, message)
        super().__init__(message)


class EstimabilityError(np.linalg.LinAlgError):
    """Raised when the history matrix does not have full column rank.

    LinAlgError is itself a ValueError subclass.
    """

    def __init__(self, rank, n):
        self.rank = rank
        self.n = n
        super().__init__(
            "history has rank {} < n = {}; target is not estimable".format(rank, n))


class CoverageError(ValueError):
    """Raised when the requested confidence exceeds the posterior's mass.

    Attributes:
        attainable: The largest confidence the posterior can provide.
    """

    def __init__(self, requested, attainable):
        self.requested = requested
        self.attainable = attainable
        super().__init__(
            "requested confidence {} exceeds attainable maximum {}".format(
                requested, attainable))
