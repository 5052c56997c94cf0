"""Exception hierarchy shared by every module (the CLI maps these to exit codes)."""


class CSQError(Exception):
    """Base class for library errors."""


class NumericalPreconditionError(CSQError):
    """A numerical precondition could not be met (bracket, truncation, decay, exactness)."""


class TruncationError(NumericalPreconditionError):
    """A coefficient tail could not be pushed below tolerance within the size cap."""


class NoSignChangeError(NumericalPreconditionError):
    """A root was requested on a bracket without a sign change."""


class ConvergenceError(CSQError):
    """An iterative kernel (series, eigensolver, quadrature self-test) failed."""


class ConsistencyError(CSQError):
    """Two independent computation routes disagreed beyond tolerance."""
