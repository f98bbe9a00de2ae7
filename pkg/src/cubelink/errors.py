"""Shared exception types."""


class CubelinkError(Exception):
    pass


class NotCubical(CubelinkError):
    """A face of the input lattice is not combinatorially a cube."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class InconsistentIncidence(CubelinkError):
    """Vertex-facet incidence does not describe a polytope lattice."""


class NoPath(CubelinkError):
    """No path satisfying the stated constraints exists."""


class CaseNotCovered(CubelinkError):
    """The constructive case analysis fell through; carries the trace so far.

    This is a bug signal: the underlying theorems guarantee the cases are
    exhaustive, so reaching this means the implementation diverged from them.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace else []


class OracleTimeout(CubelinkError):
    """The exhaustive oracle exceeded its budget; carries partial state."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
