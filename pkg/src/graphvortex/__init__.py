"""Solver for the vortex equation on connected weighted finite graphs.

The equation solved is

    laplacian(u) = exp(u) - 1 + 4*pi * sum_s n_s * dirac(z_s)

which has a unique solution exactly when 4*pi*N < total volume, where N is
the sum of the multiplicities n_s.  The solver brackets the solution between
a supersolution and a subsolution and runs a monotone iteration down from
the top; an independent Newton route is available as a cross-check.
"""

from . import errors, formats, generators
from .errors import GraphVortexError
from .graph import (
    VertexFunction,
    WeightedGraph,
    dirac,
    gradient_form,
    gradient_norm,
    integrate,
    laplacian,
    lp_norm,
    validate_graph,
)
from .linalg import LinearSolveSettings, residual_sup, solve_poisson, solve_shifted
from .solver import (
    FOUR_PI,
    IterationTrace,
    SolveReport,
    SolverSettings,
    VortexConfig,
    assemble_solution,
    background_potential,
    existence_check,
    monotone_solve,
    newton_oracle,
    pointwise_residual,
    resolve_source,
    solve,
    subsolution,
    supersolution,
)

__version__ = "0.1.0"

__all__ = [
    "FOUR_PI",
    "GraphVortexError",
    "IterationTrace",
    "LinearSolveSettings",
    "SolveReport",
    "SolverSettings",
    "VertexFunction",
    "VortexConfig",
    "WeightedGraph",
    "assemble_solution",
    "background_potential",
    "dirac",
    "errors",
    "existence_check",
    "formats",
    "generators",
    "gradient_form",
    "gradient_norm",
    "integrate",
    "laplacian",
    "lp_norm",
    "monotone_solve",
    "newton_oracle",
    "pointwise_residual",
    "resolve_source",
    "residual_sup",
    "solve",
    "solve_poisson",
    "solve_shifted",
    "subsolution",
    "supersolution",
    "validate_graph",
    "__version__",
]
