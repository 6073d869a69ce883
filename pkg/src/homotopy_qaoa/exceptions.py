"""Exception types shared across the package."""


class GraphParseError(ValueError):
    """A graph document is malformed or violates a structural invariant."""


class ResourceError(RuntimeError):
    """The requested problem size exceeds the configured memory budget."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit non-finite values.

    ``best`` carries the best estimate available at the point of failure
    (solver-dependent: partial eigenvalues, last good iterate, ...).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
