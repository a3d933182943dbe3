"""Text format round trips and parse errors with line numbers."""

import math
import random

import numpy as np
import pytest

import graphvortex as gv
from graphvortex import formats
from graphvortex.errors import (
    DuplicateVortex,
    NonPositiveMultiplicity,
    ParseError,
    SelfLoop,
    UnknownVertex,
)
from graphvortex.generators import GraphSpec, build

TWO_VERTEX_FILE = """\
# the smallest hand-oracle graph
[vertices]
a 1.0
b 1.0

[edges]
a b 1.0
"""


def test_parse_basic_graph():
    g = formats.parse_graph(TWO_VERTEX_FILE)
    assert g == gv.validate_graph([("a", 1.0), ("b", 1.0)], [("a", "b", 1.0)])


def test_parse_handles_comments_and_blanks():
    text = "\n# lead\n[vertices]\nx 2.0   # inline note\ny 3.0\n\n[edges]\nx y 1.5\n# done\n"
    g = formats.parse_graph(text)
    assert g.total_volume == 5.0
    assert list(g.iter_edges()) == [("x", "y", 1.5)]


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        formats.parse_graph("[vertices]\na 1.0\n[middle]\n")
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)

    with pytest.raises(ParseError) as exc:
        formats.parse_graph("a 1.0\n")
    assert exc.value.line == 1

    with pytest.raises(ParseError) as exc:
        formats.parse_graph("[vertices]\na 1.0 extra\n")
    assert exc.value.line == 2

    with pytest.raises(ParseError) as exc:
        formats.parse_graph("[vertices]\na bogus\n")
    assert exc.value.line == 2

    with pytest.raises(ParseError) as exc:
        formats.parse_graph("[vertices]\na 1.0\nb 1.0\n[edges]\na b\n")
    assert exc.value.line == 5


def test_parse_self_loop_reports_line():
    text = "[vertices]\na 1.0\nb 1.0\n[edges]\na b 1.0\na a 2.0\n"
    with pytest.raises(SelfLoop) as exc:
        formats.parse_graph(text)
    assert "line 6" in str(exc.value)


def test_round_trip_exact_floats():
    # values chosen to stress shortest round-trip formatting
    tricky = [0.1, 1.0 / 3.0, math.pi, 1e-17, 1.2345678901234567e300, 5e-324]
    vertices = [(f"n{i}", abs(m) if m > 0 else 1.0) for i, m in enumerate(tricky)]
    edges = [(f"n{i}", f"n{i+1}", tricky[i] if tricky[i] > 0 else 1.0)
             for i in range(len(tricky) - 1)]
    g = gv.validate_graph(vertices, edges)
    again = formats.parse_graph(formats.serialize_graph(g))
    assert again == g
    assert np.array_equal(again.measure, g.measure)


def test_round_trip_generated_graphs():
    # the 100-graph sweep lives in the acceptance suite
    rng = random.Random(61)
    for _ in range(10):
        kind = rng.choice(["path", "cycle", "complete", "grid2d", "random_gnp"])
        spec = GraphSpec(
            kind=kind,
            n=rng.randrange(3, 12),
            rows=rng.randrange(2, 5),
            cols=rng.randrange(2, 5),
            p=rng.uniform(0.4, 1.0),
            seed=rng.randrange(1000),
            weight=rng.uniform(0.1, 3.0),
            measure=rng.uniform(0.1, 3.0),
        )
        g = build(spec)
        assert formats.parse_graph(formats.serialize_graph(g)) == g


def test_parse_vortices():
    g = formats.parse_graph(TWO_VERTEX_FILE)
    vc = formats.parse_vortices("a 1\nb 2\n", g)
    assert vc.total_n == 3
    assert formats.parse_vortices("# none\n", g).total_n == 0


def test_parse_vortices_errors():
    g = formats.parse_graph(TWO_VERTEX_FILE)
    with pytest.raises(NonPositiveMultiplicity):
        formats.parse_vortices("a 0\n", g)
    with pytest.raises(DuplicateVortex):
        formats.parse_vortices("a 1\na 2\n", g)
    with pytest.raises(UnknownVertex):
        formats.parse_vortices("q 1\n", g)
    with pytest.raises(ParseError) as exc:
        formats.parse_vortices("a 1.5\n", g)
    assert exc.value.line == 1
    with pytest.raises(ParseError):
        formats.parse_vortices("a\n", g)


def test_solution_csv_round_trip():
    g = build(GraphSpec(kind="grid2d", rows=3, cols=3))
    vort = gv.VortexConfig((("r1c1", 1),))
    # 9 < 4*pi: unsolvable, so exercise the CSV on a made-up function instead
    u = gv.VertexFunction(g, np.linspace(-1.0, 0.5, 9))
    text = formats.serialize_solution_csv(g, vort, u)
    lines = text.splitlines()
    assert lines[0] == "vertex,u,exp_u,residual"
    assert len(lines) == 10
    table = formats.parse_solution_csv(text)
    res = gv.pointwise_residual(g, vort, u)
    for i, vid in enumerate(g.vertices):
        got_u, got_exp, got_res = table[vid]
        assert got_u == float(u.values[i])
        assert got_exp == float(np.exp(u.values[i]))
        assert got_res == float(res.values[i])


def test_solution_csv_header_required():
    with pytest.raises(ParseError):
        formats.parse_solution_csv("vertex,u\nv0,1.0\n")


def test_trace_serialization():
    text = formats.serialize_trace([0.5, 0.25, 0.125])
    assert text == "1 0.5\n2 0.25\n3 0.125\n"
    assert formats.serialize_trace([]) == ""
