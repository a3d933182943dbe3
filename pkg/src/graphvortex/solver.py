"""Solver for the vortex equation on a weighted graph.

The equation, for a prescribed finite set of vortices ``z_s`` with positive
integer multiplicities ``n_s`` and ``N = sum n_s``, is

    laplacian(u) = e^u - 1 + 4*pi * sum_s n_s * dirac(z_s).

A solution exists, and is unique, exactly when ``4*pi*N < |V|`` where ``|V|``
is the total measure of the graph.  The solver follows the constructive
route behind that statement:

1.  Split off a background potential ``u0`` solving the linear problem
    ``laplacian(u0) = -4*pi*N*f + 4*pi*sum n_s dirac(z_s)`` for a source
    ``f`` of unit integral (uniform by default).  The remainder
    ``v = u - u0`` then satisfies the regular equation
    ``laplacian(v) = e^(v+u0) - 1 + 4*pi*N*f`` with no Dirac data.
2.  Build a supersolution ``U`` (one linear shifted solve) and a subsolution
    ``Z`` (one Poisson solve plus a constant drop below the solution level),
    with ``Z <= U``.
3.  Run the monotone iteration
    ``(laplacian - K) w_{k+1} = e^(u0+w_k) - K*w_k + 4*pi*N*f - 1``
    from ``w_0 = U`` with ``K = max e^(u0+U) + k_margin``.  The iterates
    decrease, stay sandwiched between ``Z`` and ``U``, and converge to the
    unique regular part ``W``; the solution is ``u = u0 + W``.

An independent damped Newton iteration on the same regular equation is
provided as a cross-check oracle; it shares no iteration state with the
monotone route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateVortex,
    IncompatibleSource,
    MaxItersExceeded,
    NonPositiveMultiplicity,
    NoSolution,
    SolverDivergence,
    ThresholdViolated,
)
from .graph import VertexFunction, WeightedGraph, _check_owned, _lap_values
from .linalg import LinearSolveSettings, _ShiftedSystem, _solve_poisson_values

__all__ = [
    "FOUR_PI",
    "VortexConfig",
    "SolverSettings",
    "IterationTrace",
    "SolveReport",
    "existence_check",
    "background_potential",
    "supersolution",
    "subsolution",
    "monotone_solve",
    "newton_oracle",
    "pointwise_residual",
    "assemble_solution",
    "solve",
]

FOUR_PI = 4.0 * math.pi

# slack used by the trace flags for ordering checks on iterates
_ORDER_SLACK = 1e-12
# slack for the one-sided inequalities verified on super/subsolutions
_SIDE_SLACK = 1e-9
# converged iterates must satisfy the regular equation this tightly,
# relative to conv_tol; well inside the documented guarantee of 100x
_RESIDUAL_FACTOR = 5.0


@dataclass(frozen=True)
class VortexConfig:
    """Vortex placement: distinct vertex ids with positive integer counts."""

    vortices: tuple[tuple[str, int], ...]

    def __post_init__(self):
        pairs = []
        seen = set()
        for vertex_id, multiplicity in self.vortices:
            vertex_id = str(vertex_id)
            if vertex_id in seen:
                raise DuplicateVortex(
                    f"vertex {vertex_id!r} carries two vortex entries"
                )
            seen.add(vertex_id)
            if isinstance(multiplicity, bool) or not isinstance(
                multiplicity, (int, np.integer)
            ) or multiplicity < 1:
                raise NonPositiveMultiplicity(
                    f"multiplicity for {vertex_id!r} must be a positive integer, "
                    f"got {multiplicity!r}"
                )
            pairs.append((vertex_id, int(multiplicity)))
        object.__setattr__(self, "vortices", tuple(pairs))

    @property
    def total_n(self) -> int:
        """Total vortex number N."""
        return sum(m for _, m in self.vortices)

    def indices(self, graph: WeightedGraph) -> list[tuple[int, int]]:
        """Resolve vertex ids against a graph; raises UnknownVertex."""
        return [(graph.index_of(v), m) for v, m in self.vortices]


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for the nonlinear solve.

    source_f is either the literal "uniform" (f = 1/|V| everywhere) or a
    VertexFunction of unit integral.  conv_tol bounds the sup-norm step at
    which the monotone iteration may stop and the Newton residual target;
    k_margin is added to max e^(u0+U) to form the iteration constant K.
    """

    source_f: object = "uniform"
    conv_tol: float = 1e-10
    max_iters: int = 10000
    k_margin: float = 1.0
    linear: LinearSolveSettings = field(default_factory=LinearSolveSettings)

    def __post_init__(self):
        if not (isinstance(self.source_f, VertexFunction)
                or self.source_f == "uniform"):
            raise ValueError('source_f must be "uniform" or a VertexFunction')
        if not self.conv_tol > 0.0:
            raise ValueError("conv_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.k_margin > 0.0:
            raise ValueError("k_margin must be positive")


@dataclass
class IterationTrace:
    """Per-iteration diagnostics of the monotone scheme.

    Lists are aligned: entry k describes the step from w_k to w_{k+1}
    (sup_diffs) and the new iterate w_{k+1} (extrema and flags).
    """

    sup_diffs: list[float] = field(default_factory=list)
    iterate_max: list[float] = field(default_factory=list)
    iterate_min: list[float] = field(default_factory=list)
    monotone_flags: list[bool] = field(default_factory=list)
    sandwich_flags: list[bool] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.sup_diffs)

    @property
    def all_monotone(self) -> bool:
        return all(self.monotone_flags)

    @property
    def all_sandwiched(self) -> bool:
        return all(self.sandwich_flags)


@dataclass(frozen=True)
class SolveReport:
    """Everything a converged solve produced.

    solution = background + regular_part; supersolution and subsolution are
    the bounds the iteration ran between; residual_sup is the sup-norm
    residual of the full vortex equation and integral_gap the defect in the
    identity  integral(e^u) = |V| - 4*pi*N.
    """

    solution: VertexFunction
    background: VertexFunction
    supersolution: VertexFunction
    subsolution: VertexFunction
    regular_part: VertexFunction
    existence_margin: float
    k_used: float
    trace: IterationTrace
    residual_sup: float
    integral_gap: float


def existence_check(graph: WeightedGraph, vortices: VortexConfig) -> float:
    """Existence margin ``|V| - 4*pi*N``; positive iff a solution exists."""
    vortices.indices(graph)
    return graph.total_volume - FOUR_PI * vortices.total_n


def _threshold_ok(graph: WeightedGraph, total_n: int) -> bool:
    return FOUR_PI * total_n < graph.total_volume


def resolve_source(graph: WeightedGraph, settings: SolverSettings) -> VertexFunction:
    """Materialize the source f of unit integral picked by the settings."""
    if isinstance(settings.source_f, VertexFunction):
        f = settings.source_f
        _check_owned(graph, f)
        sup_f = float(np.max(np.abs(f.values)))
        gap = abs(float(np.sum(graph.measure * f.values)) - 1.0)
        if gap > 1e-9 * (1.0 + sup_f) * graph.total_volume:
            raise IncompatibleSource(
                f"source must have unit integral; defect {gap!r}"
            )
        return f
    return VertexFunction.constant(graph, 1.0 / graph.total_volume)


def _dirac_load(graph: WeightedGraph, vortices: VortexConfig) -> np.ndarray:
    """Values of 4*pi * sum n_s dirac(z_s)."""
    load = np.zeros(graph.vertex_count)
    for i, m in vortices.indices(graph):
        load[i] += FOUR_PI * m / graph.measure[i]
    return load


def background_potential(
    graph: WeightedGraph,
    vortices: VortexConfig,
    source: VertexFunction,
    settings: SolverSettings,
) -> VertexFunction:
    """Mean-zero u0 with laplacian(u0) = -4*pi*N*source + 4*pi*sum n_s dirac(z_s)."""
    _check_owned(graph, source)
    rhs = -FOUR_PI * vortices.total_n * source.values + _dirac_load(graph, vortices)
    u0 = _solve_poisson_values(graph, -rhs, settings.linear)
    return VertexFunction(graph, u0)


def supersolution(
    graph: WeightedGraph,
    background: VertexFunction,
    source: VertexFunction,
    total_n: int,
    settings: SolverSettings,
) -> VertexFunction:
    """Upper barrier U solving (laplacian - e^u0) U = 4*pi*N*f - 1.

    Since e^U >= 1 + U pointwise, U satisfies
    laplacian(U) - e^(u0+U) - (4*pi*N*f - 1) <= 0; the inequality is
    verified with slack 1e-9 before returning.
    """
    _check_owned(graph, background, source)
    c = np.exp(background.values)
    rhs = FOUR_PI * total_n * source.values - 1.0
    system = _ShiftedSystem(graph, c, settings.linear)
    upper = system.solve(rhs)
    defect = _lap_values(graph, upper) - np.exp(background.values + upper) - rhs
    worst = float(np.max(defect))
    if worst > _SIDE_SLACK:
        raise SolverDivergence(
            f"supersolution inequality violated by {worst!r}"
        )
    return VertexFunction(graph, upper)


def subsolution(
    graph: WeightedGraph,
    background: VertexFunction,
    source: VertexFunction,
    total_n: int,
    settings: SolverSettings,
    upper: VertexFunction | None = None,
) -> VertexFunction:
    """Lower barrier Z below the solution level and below ``upper``.

    Z = Z0 + const where laplacian(Z0) = 4*pi*N*(f - 1/|V|) with zero mean
    and the constant drops Z to min(log(1 - 4*pi*N/|V|) - u0 - Z0).  Both
    defining inequalities are verified with slack 1e-9.
    """
    _check_owned(graph, background, source)
    vol = graph.total_volume
    ratio = FOUR_PI * total_n / vol
    if ratio >= 1.0:
        raise ThresholdViolated(
            f"subsolution needs 4*pi*N < |V|; got 4*pi*N = {FOUR_PI * total_n!r} "
            f"against |V| = {vol!r}"
        )
    # grouping as f - 1/|V| makes the uniform source collapse to an exact zero
    rhs0 = FOUR_PI * total_n * (source.values - 1.0 / vol)
    z0 = _solve_poisson_values(graph, -rhs0, settings.linear)
    level = math.log1p(-ratio)
    shift = float(np.min(level - background.values - z0))
    lower = z0 + shift
    rhs = FOUR_PI * total_n * source.values - 1.0
    defect = (_lap_values(graph, lower)
              - np.exp(background.values + lower) - rhs)
    worst = float(np.min(defect))
    if worst < -_SIDE_SLACK:
        raise SolverDivergence(f"subsolution inequality violated by {worst!r}")
    if upper is not None:
        _check_owned(graph, upper)
        gap = float(np.max(lower - upper.values))
        if gap > _SIDE_SLACK:
            raise SolverDivergence(
                f"subsolution exceeds the supersolution by {gap!r}"
            )
    return VertexFunction(graph, lower)


def monotone_solve(
    graph: WeightedGraph,
    background: VertexFunction,
    source: VertexFunction,
    total_n: int,
    settings: SolverSettings,
    upper: VertexFunction | None = None,
    lower: VertexFunction | None = None,
) -> tuple[VertexFunction, IterationTrace, float]:
    """Monotone iteration for the regular part of the solution.

    Starting from the supersolution, each step solves one shifted linear
    system with the fixed coefficient K = max e^(u0+U) + k_margin:

        (laplacian - K) w_{k+1} = e^(u0+w_k) - K*w_k + 4*pi*N*f - 1.

    The sequence decreases pointwise, stays between the subsolution and the
    supersolution (both facts are recorded per step and enforced up to a
    1e-12 slack), and stops once the sup-norm step is below conv_tol and the
    regular equation's residual is within 5 * conv_tol.

    Returns (regular_part, trace, k_used).  Raises MaxItersExceeded with the
    trace attached if the cap is hit first.
    """
    _check_owned(graph, background, source)
    if not _threshold_ok(graph, total_n):
        raise ThresholdViolated(
            f"monotone iteration needs 4*pi*N < |V|; got 4*pi*N = "
            f"{FOUR_PI * total_n!r} against |V| = {graph.total_volume!r}"
        )
    if upper is None:
        upper = supersolution(graph, background, source, total_n, settings)
    else:
        _check_owned(graph, upper)
    if lower is None:
        lower = subsolution(graph, background, source, total_n, settings,
                            upper=upper)
    else:
        _check_owned(graph, lower)

    u0 = background.values
    k_used = float(np.max(np.exp(u0 + upper.values))) + settings.k_margin
    system = _ShiftedSystem(graph, np.full(graph.vertex_count, k_used),
                            settings.linear)
    rhs_const = FOUR_PI * total_n * source.values - 1.0
    # inner solves tighter than the step tolerance so solve noise cannot
    # disturb the ordering flags or the stopping test
    inner_target = settings.conv_tol * k_used / 100.0

    floor = lower.values - _ORDER_SLACK
    ceil = upper.values + _ORDER_SLACK
    residual_goal = _RESIDUAL_FACTOR * settings.conv_tol

    trace = IterationTrace()
    w = upper.values.copy()
    for _ in range(settings.max_iters):
        rhs = np.exp(u0 + w) - k_used * w + rhs_const
        w_next = system.solve(rhs, x0=w, target=inner_target)
        diff = float(np.max(np.abs(w_next - w)))
        monotone_ok = bool(np.all(w_next <= w + _ORDER_SLACK))
        sandwich_ok = bool(np.all(w_next >= floor) and np.all(w_next <= ceil))
        trace.sup_diffs.append(diff)
        trace.iterate_max.append(float(np.max(w_next)))
        trace.iterate_min.append(float(np.min(w_next)))
        trace.monotone_flags.append(monotone_ok)
        trace.sandwich_flags.append(sandwich_ok)
        if not monotone_ok:
            raise SolverDivergence(
                "monotone iteration produced an increasing step"
            )
        if not sandwich_ok:
            raise SolverDivergence(
                "monotone iterate escaped the barrier interval"
            )
        w = w_next
        if diff < settings.conv_tol:
            residual = float(np.max(np.abs(
                _lap_values(graph, w) - np.exp(u0 + w) - rhs_const
            )))
            if residual <= residual_goal:
                return VertexFunction(graph, w), trace, k_used
    raise MaxItersExceeded(
        f"monotone iteration did not converge in {settings.max_iters} steps",
        iterations=settings.max_iters,
        trace=trace,
    )


def newton_oracle(
    graph: WeightedGraph,
    background: VertexFunction,
    source: VertexFunction,
    total_n: int,
    settings: SolverSettings,
    start: object = "lower",
) -> VertexFunction:
    """Independent damped Newton solve of the regular equation.

    F(v) = laplacian(v) - e^(v+u0) + 1 - 4*pi*N*f; each step solves
    (laplacian - e^(v+u0)) delta = -F(v) and halves the step until the
    sup-norm of F decreases.  ``start`` selects the initial iterate:
    "lower" (the subsolution, default), "upper" (the supersolution), or any
    VertexFunction, so uniqueness can be probed from both sides.  Stops when
    sup|F| < conv_tol.
    """
    _check_owned(graph, background, source)
    if not _threshold_ok(graph, total_n):
        raise ThresholdViolated(
            f"Newton oracle needs 4*pi*N < |V|; got 4*pi*N = "
            f"{FOUR_PI * total_n!r} against |V| = {graph.total_volume!r}"
        )
    if isinstance(start, VertexFunction):
        _check_owned(graph, start)
        v = start.values.copy()
    elif start == "lower":
        v = subsolution(graph, background, source, total_n, settings).values.copy()
    elif start == "upper":
        v = supersolution(graph, background, source, total_n, settings).values.copy()
    else:
        raise ValueError('start must be "lower", "upper", or a VertexFunction')

    u0 = background.values
    rhs_const = FOUR_PI * total_n * source.values - 1.0

    def residual(vec: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return _lap_values(graph, vec) - np.exp(u0 + vec) - rhs_const

    current = residual(v)
    current_norm = float(np.max(np.abs(current)))
    for _ in range(settings.max_iters):
        if current_norm < settings.conv_tol:
            return VertexFunction(graph, v)
        system = _ShiftedSystem(graph, np.exp(u0 + v), settings.linear)
        delta = system.solve(-current)
        step = 1.0
        for _ in range(64):
            candidate = v + step * delta
            cand_res = residual(candidate)
            if np.all(np.isfinite(cand_res)):
                cand_norm = float(np.max(np.abs(cand_res)))
                if cand_norm < current_norm:
                    break
            step *= 0.5
        else:
            raise SolverDivergence(
                "Newton line search could not reduce the residual"
            )
        v, current, current_norm = candidate, cand_res, cand_norm
    raise MaxItersExceeded(
        f"Newton iteration did not converge in {settings.max_iters} steps",
        iterations=settings.max_iters,
    )


def pointwise_residual(
    graph: WeightedGraph, vortices: VortexConfig, u: VertexFunction
) -> VertexFunction:
    """Residual of the full vortex equation at each vertex."""
    _check_owned(graph, u)
    res = (_lap_values(graph, u.values) - np.exp(u.values) + 1.0
           - _dirac_load(graph, vortices))
    return VertexFunction(graph, res)


def assemble_solution(
    graph: WeightedGraph,
    vortices: VortexConfig,
    background: VertexFunction,
    regular_part: VertexFunction,
) -> tuple[VertexFunction, float, float]:
    """Combine u = background + regular_part and measure its quality.

    Returns (u, residual_sup, integral_gap) where integral_gap is the defect
    in integral(e^u) = |V| - 4*pi*N.
    """
    _check_owned(graph, background, regular_part)
    u = VertexFunction(graph, background.values + regular_part.values)
    residual = float(np.max(np.abs(pointwise_residual(graph, vortices, u).values)))
    expected = graph.total_volume - FOUR_PI * vortices.total_n
    gap = abs(float(np.sum(graph.measure * np.exp(u.values))) - expected)
    return u, residual, gap


def solve(
    graph: WeightedGraph,
    vortices: VortexConfig,
    settings: SolverSettings | None = None,
) -> SolveReport:
    """Solve the vortex equation on a graph, or prove there is no solution.

    Checks the existence margin |V| - 4*pi*N first and raises NoSolution
    carrying the non-positive margin when it fails; that verdict is exact,
    not a numerical giving-up.  Otherwise runs the full pipeline (background
    potential, barriers, monotone iteration) and returns a SolveReport.
    """
    settings = settings or SolverSettings()
    margin = existence_check(graph, vortices)
    if margin <= 0.0:
        raise NoSolution(margin)
    source = resolve_source(graph, settings)
    u0 = background_potential(graph, vortices, source, settings)
    total_n = vortices.total_n
    upper = supersolution(graph, u0, source, total_n, settings)
    lower = subsolution(graph, u0, source, total_n, settings, upper=upper)
    regular, trace, k_used = monotone_solve(
        graph, u0, source, total_n, settings, upper=upper, lower=lower
    )
    u, residual, gap = assemble_solution(graph, vortices, u0, regular)
    return SolveReport(
        solution=u,
        background=u0,
        supersolution=upper,
        subsolution=lower,
        regular_part=regular,
        existence_margin=margin,
        k_used=k_used,
        trace=trace,
        residual_sup=residual,
        integral_gap=gap,
    )
