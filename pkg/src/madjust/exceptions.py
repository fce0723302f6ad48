"""Exception types raised across the package."""


class MGraphError(ValueError):
    """An m-graph violates a structural invariant."""


class GraphFormatError(MGraphError):
    """Malformed graph or SCM text.

    Parameters
    ----------
    message : str
        What went wrong.
    lineno : int, optional
        1-based line number of the offending line.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnknownNodeError(MGraphError):
    """A query referenced a node that is not in the graph."""


class QueryError(ValueError):
    """Treatment/outcome/covariate sets do not form a valid query."""


class DataFormatError(ValueError):
    """A dataset file does not have the expected shape."""


class EstimationError(ValueError):
    """An effect cannot be estimated from the data at hand."""


class PositivityError(EstimationError):
    """An adjustment stratum has covariate mass but no matching treated rows."""


class CriterionError(EstimationError):
    """The covariate set fails the relevant adjustment criterion."""


class InconsistencyError(RuntimeError):
    """An algorithm produced an answer that its own verification rejects."""
