"""Linear solves for the graph operators.

Two problems are covered, both with a verified sup-norm residual contract:

* Poisson: find the mean-zero ``u`` with ``-laplacian(u) = f``, solvable
  exactly when the source integrates to zero.  The kernel of the Laplacian
  (constants) is handled by projecting onto the mean-zero subspace, never by
  pinning a vertex.
* Shifted: find the unique ``u`` with ``laplacian(u) - c*u = rhs`` for a
  pointwise positive coefficient ``c``.

Small systems go through a dense symmetric positive definite factorization;
large ones through conjugate gradients in the mu-weighted inner product with
Jacobi preconditioning.  Every solve checks its residual before returning and
raises SolverDivergence instead of handing back a bad vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    GraphMismatch,
    IncompatibleSource,
    NonPositiveShift,
    SolverDivergence,
)
from .graph import VertexFunction, WeightedGraph, _check_owned, _lap_values

__all__ = [
    "LinearSolveSettings",
    "solve_poisson",
    "solve_shifted",
    "residual_sup",
]

_METHODS = ("auto", "direct", "conjugate_gradient")
# above this size "auto" switches from the dense factorization to CG
_DIRECT_LIMIT = 512
# source compatibility tolerance for the Poisson problem
_COMPAT_TOL = 1e-9


@dataclass(frozen=True)
class LinearSolveSettings:
    """Knobs shared by all linear solves.

    residual_tol is relative: a solve for right-hand side ``b`` must reach a
    sup-norm residual of at most ``residual_tol * (1 + sup|b|)``.
    max_cg_iters defaults to 10 * n when left unset.  The method tag picks
    the dense factorization, conjugate gradients, or a size-based choice.
    """

    residual_tol: float = 1e-12
    max_cg_iters: int | None = None
    method: str = "auto"

    def __post_init__(self):
        if not self.residual_tol > 0.0:
            raise ValueError("residual_tol must be positive")
        if self.max_cg_iters is not None and self.max_cg_iters < 1:
            raise ValueError("max_cg_iters must be at least 1 when given")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")


def _resolved_method(settings: LinearSolveSettings, n: int) -> str:
    if settings.method == "auto":
        return "direct" if n <= _DIRECT_LIMIT else "conjugate_gradient"
    return settings.method


def _cg_limit(settings: LinearSolveSettings, n: int) -> int:
    return settings.max_cg_iters if settings.max_cg_iters is not None else 10 * n


def _mu_dot(mu: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(mu * a * b))


def _pcg(op, b, jacobi_diag, mu, x0, tol_abs, max_iters, project=None):
    """Preconditioned CG in the mu-weighted inner product.

    ``op`` must be self-adjoint and positive (semi)definite in that product.
    ``project``, when given, maps vectors onto the solvable subspace and is
    applied to the iterate, the residual, and the preconditioned residual.
    Returns (x, converged) where converged reports sup|b - op(x)| <= tol_abs
    for the recurrence residual.
    """
    x = x0.copy()
    if project is not None:
        x = project(x)
    r = b - op(x)
    if project is not None:
        r = project(r)
    if float(np.max(np.abs(r))) <= tol_abs:
        return x, True
    z = r / jacobi_diag
    if project is not None:
        z = project(z)
    p = z.copy()
    rz = _mu_dot(mu, r, z)
    for iteration in range(max_iters):
        q = op(p)
        pq = _mu_dot(mu, p, q)
        if not pq > 0.0:
            raise SolverDivergence(
                "conjugate gradient breakdown: operator lost positivity"
            )
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        if project is not None and (iteration & 63) == 63:
            x = project(x)
            r = b - op(x)
            r = project(r)
        if float(np.max(np.abs(r))) <= tol_abs:
            if project is not None:
                x = project(x)
            return x, True
        z = r / jacobi_diag
        if project is not None:
            z = project(z)
        rz_next = _mu_dot(mu, r, z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    if project is not None:
        x = project(x)
    return x, False


class _ShiftedSystem:
    """Reusable solver for ``laplacian(u) - c*u = rhs`` with fixed ``c > 0``.

    In matrix form the problem is ``P u = -mu*rhs`` with the symmetric
    positive definite ``P = diag(deg) - A + diag(mu*c)``.  Monotone iteration
    reuses one instance across thousands of right-hand sides, so the direct
    path keeps an explicit inverse (the systems involved are well
    conditioned: P is diagonally dominant with positive diagonal).
    """

    def __init__(self, graph: WeightedGraph, c: np.ndarray,
                 settings: LinearSolveSettings):
        c = np.asarray(c, dtype=np.float64)
        if not np.all(np.isfinite(c)) or not np.all(c > 0.0):
            raise NonPositiveShift(
                "shifted solves require a pointwise positive finite coefficient"
            )
        n = graph.vertex_count
        self.graph = graph
        self.c = c
        self.settings = settings
        self.method = _resolved_method(settings, n)
        self._pdiag = graph._deg + graph.measure * c
        # sup operator norm of u -> -laplacian(u) + c*u; scales the
        # smallest residual one operator application can certify
        self._opnorm = float(np.max((self._pdiag + graph._deg) / graph.measure))
        if self.method == "direct":
            if n <= _DIRECT_LIMIT:
                dense = np.diag(self._pdiag) - graph._adj.toarray()
                factor = scipy.linalg.cho_factor(dense)
                self._inv = scipy.linalg.cho_solve(factor, np.eye(n))
            else:
                matrix = (sp.diags(self._pdiag) - graph._adj).tocsc()
                self._inv = None
                self._lu = spla.splu(matrix)
        else:
            self._jacobi = self._pdiag / graph.measure

    def _op(self, x: np.ndarray) -> np.ndarray:
        # -laplacian(x) + c*x, evaluated through P for speed
        g = self.graph
        return (self._pdiag * x - g._adj @ x) / g.measure

    def _floor(self, sup_rhs: float, u: np.ndarray) -> float:
        # backward-error level: residuals below the rounding noise of one
        # operator application cannot be certified by any solver
        scale = 1.0 + sup_rhs + self._opnorm * float(np.max(np.abs(u)))
        return 32.0 * np.finfo(np.float64).eps * scale

    def solve(self, rhs: np.ndarray, x0: np.ndarray | None = None,
              target: float | None = None) -> np.ndarray:
        g = self.graph
        sup_rhs = float(np.max(np.abs(rhs)))
        tol_abs = self.settings.residual_tol * (1.0 + sup_rhs)
        if target is not None:
            floor = 32.0 * np.finfo(np.float64).eps * (1.0 + sup_rhs)
            tol_abs = max(min(tol_abs, target), floor)
        b = -rhs
        if self.method == "direct":
            pb = -(g.measure * rhs)

            def apply(v):
                return self._inv @ v if self._inv is not None else self._lu.solve(v)

            u = apply(pb)
            residual = float(np.max(np.abs(b - self._op(u))))
            if residual > max(tol_abs, self._floor(sup_rhs, u)):
                # one refinement step recovers borderline rounding
                u = u + apply(pb - (self._pdiag * u - g._adj @ u))
                residual = float(np.max(np.abs(b - self._op(u))))
            if residual > max(tol_abs, self._floor(sup_rhs, u)):
                raise SolverDivergence(
                    f"direct shifted solve residual {residual!r} exceeds {tol_abs!r}"
                )
            return u
        x0 = np.zeros(g.vertex_count) if x0 is None else x0
        limit = _cg_limit(self.settings, g.vertex_count)
        u, converged = _pcg(self._op, b, self._jacobi, g.measure, x0,
                            tol_abs, limit)
        residual = float(np.max(np.abs(b - self._op(u))))
        if residual > max(tol_abs, self._floor(sup_rhs, u)):
            # recurrence drift: one restart from the current iterate
            u, converged = _pcg(self._op, b, self._jacobi, g.measure, u,
                                tol_abs, limit)
            residual = float(np.max(np.abs(b - self._op(u))))
        if residual > max(tol_abs, self._floor(sup_rhs, u)):
            raise SolverDivergence(
                f"conjugate gradient stalled at residual {residual!r} "
                f"(target {tol_abs!r})"
            )
        return u


def _solve_poisson_values(graph: WeightedGraph, f: np.ndarray,
                          settings: LinearSolveSettings) -> np.ndarray:
    n = graph.vertex_count
    vol = graph.total_volume
    sup_f = float(np.max(np.abs(f))) if n else 0.0
    imbalance = float(np.sum(graph.measure * f))
    if abs(imbalance) > _COMPAT_TOL * (1.0 + sup_f) * vol:
        raise IncompatibleSource(
            f"source integrates to {imbalance!r}; the Poisson problem needs zero"
        )
    if n == 1:
        return np.zeros(1)

    # residuals are measured against the balanced part of f; the constant
    # imbalance allowed by the compatibility tolerance is not resolvable
    f_bal = f - imbalance / vol
    tol_abs = settings.residual_tol * (1.0 + sup_f)
    method = _resolved_method(settings, n)

    def op(x: np.ndarray) -> np.ndarray:
        return (graph._deg * x - graph._adj @ x) / graph.measure

    if method == "direct":
        b = graph.measure * f_bal
        if n <= _DIRECT_LIMIT:
            dense = (np.diag(graph._deg) - graph._adj.toarray()
                     + np.outer(graph.measure, graph.measure) / vol)
            factor = scipy.linalg.cho_factor(dense)
            u = scipy.linalg.cho_solve(factor, b)
        else:
            mu_col = sp.csc_matrix(graph.measure.reshape(-1, 1))
            mu_row = sp.csc_matrix(graph.measure.reshape(1, -1))
            core = sp.diags(graph._deg) - graph._adj
            bordered = sp.bmat([[core, mu_col], [mu_row, None]], format="csc")
            u = spla.splu(bordered).solve(np.append(b, 0.0))[:n]
        u -= np.sum(graph.measure * u) / vol
        residual = float(np.max(np.abs(f_bal - op(u))))
        if residual > tol_abs:
            raise SolverDivergence(
                f"direct Poisson solve residual {residual!r} exceeds {tol_abs!r}"
            )
        return u

    def project(x: np.ndarray) -> np.ndarray:
        return x - np.sum(graph.measure * x) / vol

    jacobi = graph._deg / graph.measure
    limit = _cg_limit(settings, n)
    u, _ = _pcg(op, f_bal, jacobi, graph.measure, np.zeros(n), tol_abs,
                limit, project=project)
    residual = float(np.max(np.abs(f_bal - op(u))))
    if residual > tol_abs:
        u, _ = _pcg(op, f_bal, jacobi, graph.measure, u, tol_abs, limit,
                    project=project)
        residual = float(np.max(np.abs(f_bal - op(u))))
    if residual > tol_abs:
        raise SolverDivergence(
            f"Poisson conjugate gradient stalled at residual {residual!r} "
            f"(target {tol_abs!r})"
        )
    return u


def solve_poisson(
    graph: WeightedGraph,
    f: VertexFunction,
    settings: LinearSolveSettings | None = None,
) -> VertexFunction:
    """Solve ``-laplacian(u) = f`` for the unique mean-zero ``u``.

    The source must integrate to zero against mu (within a relative 1e-9
    tolerance); otherwise no solution exists and IncompatibleSource is
    raised.  The returned function has integral zero and sup-norm residual
    within the settings' contract.
    """
    _check_owned(graph, f)
    settings = settings or LinearSolveSettings()
    return VertexFunction(graph, _solve_poisson_values(graph, f.values, settings))


def solve_shifted(
    graph: WeightedGraph,
    c: VertexFunction,
    rhs: VertexFunction,
    settings: LinearSolveSettings | None = None,
) -> VertexFunction:
    """Solve ``laplacian(u) - c*u = rhs`` for pointwise positive ``c``.

    The operator is invertible for any positive shift, so the solution is
    unique; the residual contract of the settings is verified before the
    result is returned, relaxed only to the floating-point rounding floor
    of one operator application when the request sits below it.
    """
    _check_owned(graph, c, rhs)
    settings = settings or LinearSolveSettings()
    system = _ShiftedSystem(graph, c.values, settings)
    return VertexFunction(graph, system.solve(rhs.values))


def residual_sup(
    graph: WeightedGraph,
    u: VertexFunction,
    rhs: VertexFunction,
    c: VertexFunction | None = None,
) -> float:
    """Sup-norm of ``laplacian(u) - c*u - rhs`` (``c`` omitted means zero)."""
    _check_owned(graph, u, rhs)
    res = _lap_values(graph, u.values) - rhs.values
    if c is not None:
        _check_owned(graph, c)
        res = res - c.values * u.values
    return float(np.max(np.abs(res)))
