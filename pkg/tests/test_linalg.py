"""Poisson and shifted linear solves: hand values, contracts, both methods."""

import random

import numpy as np
import pytest

from graphvortex import (
    LinearSolveSettings,
    VertexFunction,
    integrate,
    residual_sup,
    solve_poisson,
    solve_shifted,
    validate_graph,
)
from graphvortex.errors import (
    IncompatibleSource,
    NonPositiveShift,
    SolverDivergence,
)
from graphvortex.generators import GraphSpec, build

from conftest import random_values

CG = LinearSolveSettings(method="conjugate_gradient")
DIRECT = LinearSolveSettings(method="direct")


def test_settings_validation():
    with pytest.raises(ValueError):
        LinearSolveSettings(residual_tol=0.0)
    with pytest.raises(ValueError):
        LinearSolveSettings(max_cg_iters=0)
    with pytest.raises(ValueError):
        LinearSolveSettings(method="magic")


def test_poisson_zero_source(two_vertex):
    f = VertexFunction.constant(two_vertex, 0.0)
    assert np.all(solve_poisson(two_vertex, f).values == 0.0)


def test_poisson_hand_value(two_vertex):
    # -laplacian(u) = f with f = (1,-1): u(a)-u(b) = 1, zero mean
    f = VertexFunction(two_vertex, [1.0, -1.0])
    u = solve_poisson(two_vertex, f)
    assert np.allclose(u.values, [0.5, -0.5], rtol=0, atol=1e-14)
    assert residual_sup(two_vertex, u, VertexFunction(two_vertex, -f.values)) <= 1e-12


def test_poisson_incompatible_source(two_vertex):
    with pytest.raises(IncompatibleSource):
        solve_poisson(two_vertex, VertexFunction(two_vertex, [1.0, 1.0]))


def test_poisson_single_vertex():
    g = validate_graph([("z", 4.0)], [])
    u = solve_poisson(g, VertexFunction.constant(g, 0.0))
    assert u.values == pytest.approx([0.0])
    with pytest.raises(IncompatibleSource):
        solve_poisson(g, VertexFunction.constant(g, 1.0))


def test_poisson_mean_zero_and_residual():
    rng = random.Random(5)
    for seed in range(4):
        g = build(GraphSpec(kind="random_gnp", n=30, p=0.4, seed=seed, measure=1.5))
        raw = random_values(rng, 30, scale=2.0)
        raw -= np.sum(g.measure * raw) / g.total_volume
        f = VertexFunction(g, raw)
        u = solve_poisson(g, f)
        sup_u = float(np.max(np.abs(u.values)))
        assert abs(integrate(g, u)) <= 1e-10 * g.total_volume * (1.0 + sup_u)
        neg = VertexFunction(g, -f.values)
        assert residual_sup(g, u, neg) <= 1e-12 * (1.0 + np.max(np.abs(f.values)))


def test_poisson_direct_vs_cg():
    rng = random.Random(17)
    g = build(GraphSpec(kind="grid2d", rows=6, cols=7, measure=2.0))
    raw = random_values(rng, 42, scale=1.0)
    raw -= np.sum(g.measure * raw) / g.total_volume
    f = VertexFunction(g, raw)
    ud = solve_poisson(g, f, DIRECT)
    uc = solve_poisson(g, f, CG)
    assert np.max(np.abs(ud.values - uc.values)) <= 1e-8


def test_poisson_large_graph_bordered_path():
    # n > 512 exercises the sparse direct branch
    g = build(GraphSpec(kind="grid2d", rows=24, cols=25, measure=1.0))
    rng = random.Random(3)
    raw = random_values(rng, 600, scale=1.0)
    raw -= np.sum(g.measure * raw) / g.total_volume
    f = VertexFunction(g, raw)
    ud = solve_poisson(g, f, DIRECT)
    uc = solve_poisson(g, f, CG)
    assert np.max(np.abs(ud.values - uc.values)) <= 1e-8
    assert abs(integrate(g, ud)) <= 1e-10 * g.total_volume * (1.0 + np.max(np.abs(ud.values)))


def test_shifted_constant_ansatz():
    g = build(GraphSpec(kind="cycle", n=5, measure=3.0))
    one = VertexFunction.constant(g, 1.0)
    rhs = VertexFunction.constant(g, -1.0)
    u = solve_shifted(g, one, rhs)
    assert np.max(np.abs(u.values - 1.0)) <= 1e-12
    k = VertexFunction.constant(g, 4.5)
    rhs2 = VertexFunction.constant(g, -4.5 * 2.25)
    u2 = solve_shifted(g, k, rhs2)
    assert np.max(np.abs(u2.values - 2.25)) <= 1e-12


def test_shifted_hand_value(two_vertex):
    # c = 2: (-3 u(a) + u(b), u(a) - 3 u(b)) = (0, -2) -> u = (1/4, 3/4)
    c = VertexFunction.constant(two_vertex, 2.0)
    rhs = VertexFunction(two_vertex, [0.0, -2.0])
    u = solve_shifted(two_vertex, c, rhs)
    assert np.allclose(u.values, [0.25, 0.75], rtol=0, atol=1e-14)
    assert residual_sup(two_vertex, u, rhs, c=c) <= 1e-12


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_shifted_requires_positive_coefficient(two_vertex, bad):
    c = VertexFunction(two_vertex, [1.0, 1.0])
    # sneak the bad value past VertexFunction finite checks via raw arrays
    rhs = VertexFunction(two_vertex, [0.0, 0.0])
    if np.isfinite(bad):
        cbad = VertexFunction(two_vertex, [1.0, bad])
        with pytest.raises(NonPositiveShift):
            solve_shifted(two_vertex, cbad, rhs)
    else:
        from graphvortex.linalg import _ShiftedSystem
        with pytest.raises(NonPositiveShift):
            _ShiftedSystem(two_vertex, np.array([1.0, bad]), LinearSolveSettings())


def test_shifted_linearity():
    rng = random.Random(41)
    g = build(GraphSpec(kind="random_gnp", n=26, p=0.5, seed=12, measure=1.2))
    c = VertexFunction(g, np.array([rng.uniform(0.5, 3.0) for _ in range(26)]))
    r1 = VertexFunction(g, random_values(rng, 26, scale=2.0))
    r2 = VertexFunction(g, random_values(rng, 26, scale=2.0))
    a, b = 2.5, -1.25
    combo = VertexFunction(g, a * r1.values + b * r2.values)
    lhs = solve_shifted(g, c, combo).values
    rhs = a * solve_shifted(g, c, r1).values + b * solve_shifted(g, c, r2).values
    scale = max(float(np.max(np.abs(lhs))), 1e-30)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale


def test_shifted_direct_vs_cg():
    rng = random.Random(43)
    g = build(GraphSpec(kind="random_gnp", n=40, p=0.3, seed=2, measure=0.8))
    c = VertexFunction(g, np.array([rng.uniform(0.2, 5.0) for _ in range(40)]))
    rhs = VertexFunction(g, random_values(rng, 40, scale=3.0))
    ud = solve_shifted(g, c, rhs, DIRECT)
    uc = solve_shifted(g, c, rhs, CG)
    assert np.max(np.abs(ud.values - uc.values)) <= 1e-8


def test_shifted_max_principle_samples():
    # the 200-trial sweep is in the acceptance suite
    rng = random.Random(47)
    for seed in range(20):
        n = rng.randrange(4, 25)
        g = build(GraphSpec(kind="random_gnp", n=n, p=0.6, seed=seed))
        k = VertexFunction.constant(g, rng.uniform(1e-3, 10.0))
        rhs = VertexFunction(g, np.array([rng.uniform(0.0, 4.0) for _ in range(n)]))
        u = solve_shifted(g, k, rhs)
        assert float(np.max(u.values)) <= 1e-10


def test_perturbation_raises_residual(two_vertex):
    c = VertexFunction.constant(two_vertex, 2.0)
    rhs = VertexFunction(two_vertex, [0.0, -2.0])
    u = solve_shifted(two_vertex, c, rhs)
    eps = 1e-3
    bumped = VertexFunction(two_vertex, u.values + np.array([eps, 0.0]))
    assert residual_sup(two_vertex, bumped, rhs, c=c) >= eps * 2.0


def test_residual_sup_self_consistency():
    rng = random.Random(53)
    g = build(GraphSpec(kind="random_gnp", n=20, p=0.5, seed=8))
    from graphvortex import laplacian
    u = VertexFunction(g, random_values(rng, 20, scale=4.0))
    c = VertexFunction(g, np.array([rng.uniform(0.1, 2.0) for _ in range(20)]))
    rhs = VertexFunction(g, laplacian(g, u).values - c.values * u.values)
    assert residual_sup(g, u, rhs, c=c) <= 1e-13 * (1.0 + np.max(np.abs(u.values)))


def test_cg_iteration_cap():
    g = build(GraphSpec(kind="grid2d", rows=12, cols=12, measure=1.0))
    rng = random.Random(59)
    raw = random_values(rng, 144, scale=1.0)
    raw -= np.sum(g.measure * raw) / g.total_volume
    f = VertexFunction(g, raw)
    starving = LinearSolveSettings(method="conjugate_gradient", max_cg_iters=1)
    with pytest.raises(SolverDivergence):
        solve_poisson(g, f, starving)
