"""Exception types raised across the package.

Every error below derives from GraphVortexError so callers can catch the
package's failures with a single except clause while still distinguishing
input problems from numerical ones.
"""


class GraphVortexError(Exception):
    """Base class for all errors raised by this package."""


# graph construction


class EmptyGraph(GraphVortexError):
    """The vertex listing is empty."""


class DuplicateVertexId(GraphVortexError):
    """The same vertex identifier appears twice in a listing."""


class NonPositiveMeasure(GraphVortexError):
    """A vertex measure is not a strictly positive finite real."""


class NonPositiveWeight(GraphVortexError):
    """An edge weight is not a strictly positive finite real."""


class SelfLoop(GraphVortexError):
    """An edge connects a vertex to itself."""


class DuplicateEdge(GraphVortexError):
    """A vertex pair appears more than twice, or twice with unequal weights."""


class DisconnectedGraph(GraphVortexError):
    """The graph is not connected."""


class UnknownVertex(GraphVortexError):
    """A vertex identifier does not belong to the graph."""


class GraphMismatch(GraphVortexError):
    """A vertex function was used with a graph it does not belong to."""


class InvalidExponent(GraphVortexError):
    """The norm exponent p is below 1 or not a number."""


# linear solves


class IncompatibleSource(GraphVortexError):
    """The Poisson right-hand side does not integrate to zero."""


class NonPositiveShift(GraphVortexError):
    """The zeroth-order coefficient of a shifted solve is not positive."""


class SolverDivergence(GraphVortexError):
    """A solve finished without meeting its residual or ordering guarantees."""


# vortex pipeline


class ThresholdViolated(GraphVortexError):
    """A construction that requires 4*pi*N < |V| was called without it."""


class DuplicateVortex(GraphVortexError):
    """The same vertex carries more than one vortex entry."""


class NonPositiveMultiplicity(GraphVortexError):
    """A vortex multiplicity is not a positive integer."""


class NoSolution(GraphVortexError):
    """The existence threshold fails, so the equation provably has no solution.

    Carries the non-positive existence margin |V| - 4*pi*N as ``margin``.
    """

    def __init__(self, margin: float):
        super().__init__(
            f"no solution exists: existence margin {margin!r} is not positive"
        )
        self.margin = margin


class MaxItersExceeded(GraphVortexError):
    """An iterative scheme hit its iteration cap before converging.

    ``iterations`` holds the count reached; ``trace`` holds the iteration
    trace when the scheme records one, for diagnosis.
    """

    def __init__(self, message: str, iterations: int, trace=None):
        super().__init__(message)
        self.iterations = iterations
        self.trace = trace


# generation and parsing


class InvalidSpec(GraphVortexError):
    """A graph generation request is malformed for its family."""


class ConnectivityRetriesExhausted(GraphVortexError):
    """Random generation kept producing disconnected graphs."""


class ParseError(GraphVortexError):
    """A text input could not be parsed.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
