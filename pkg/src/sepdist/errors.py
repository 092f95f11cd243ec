"""Exception types raised across the toolkit."""


class SepdistError(ValueError):
    """Base class for invalid inputs."""


class NotHermitian(SepdistError):
    pass


class BadIndex(SepdistError):
    pass


class BadPartition(SepdistError):
    pass


class BadDims(SepdistError):
    pass


class DimMismatch(SepdistError):
    pass


class BadEpsilon(SepdistError):
    pass


class BadAlpha(SepdistError):
    pass


class BadMode(SepdistError):
    pass


class BadGrid(SepdistError):
    pass


class NotOrthogonal(SepdistError):
    pass


class InvalidState(SepdistError):
    """Matrix fails the density-matrix checks (trace, Hermiticity, positivity)."""


class ConsistencyError(RuntimeError):
    """A computed object disagrees with its independently constructed literal."""
