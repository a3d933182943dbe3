"""Text formats: graph files, vortex files, solution CSV, iteration traces.

Graph file layout (``#`` starts a comment anywhere, blank lines ignored):

    [vertices]
    <id> <measure>
    ...
    [edges]
    <id> <id> <weight>
    ...

Vortex file: one ``<id> <multiplicity>`` per line.  Solution CSV: header
``vertex,u,exp_u,residual`` and one row per vertex in graph order.  All
floats are written with Python's shortest round-trip representation, so
parse(serialize(x)) reproduces every value bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError, SelfLoop
from .graph import VertexFunction, WeightedGraph, validate_graph
from .solver import VortexConfig, pointwise_residual

__all__ = [
    "parse_graph",
    "serialize_graph",
    "parse_vortices",
    "serialize_solution_csv",
    "parse_solution_csv",
    "serialize_trace",
]


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_float(token: str, what: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", lineno) from None


def parse_graph(text: str) -> WeightedGraph:
    """Parse a graph file; raises ParseError with the offending line number.

    Structural problems detected per line (unknown section, malformed row,
    self loop) carry the line number; whole-graph validation failures
    (connectivity, duplicate edges, ...) propagate from validate_graph.
    """
    vertices: list[tuple[str, float]] = []
    edges: list[tuple[str, str, float]] = []
    section = None
    for lineno, line in _content_lines(text):
        if line.startswith("["):
            if line == "[vertices]":
                section = "vertices"
            elif line == "[edges]":
                section = "edges"
            else:
                raise ParseError(f"unknown section {line!r}", lineno)
            continue
        if section is None:
            raise ParseError("entry before any section header", lineno)
        tokens = line.split()
        if section == "vertices":
            if len(tokens) != 2:
                raise ParseError(
                    "vertex lines need exactly '<id> <measure>'", lineno
                )
            vertices.append((tokens[0], _parse_float(tokens[1], "measure", lineno)))
        else:
            if len(tokens) != 3:
                raise ParseError(
                    "edge lines need exactly '<id> <id> <weight>'", lineno
                )
            if tokens[0] == tokens[1]:
                raise SelfLoop(f"line {lineno}: self loop at vertex {tokens[0]!r}")
            edges.append(
                (tokens[0], tokens[1], _parse_float(tokens[2], "weight", lineno))
            )
    return validate_graph(vertices, edges)


def serialize_graph(graph: WeightedGraph) -> str:
    """Graph file text; parse(serialize(g)) == g."""
    out = ["[vertices]"]
    for vid, m in zip(graph.vertices, graph.measure):
        out.append(f"{vid} {float(m)!r}")
    out.append("[edges]")
    for a, b, w in graph.iter_edges():
        out.append(f"{a} {b} {float(w)!r}")
    return "\n".join(out) + "\n"


def parse_vortices(text: str, graph: WeightedGraph) -> VortexConfig:
    """Parse a vortex file against a graph.

    Multiplicities must be positive integers; vertices must exist in the
    graph and appear at most once.
    """
    pairs: list[tuple[str, int]] = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(
                "vortex lines need exactly '<id> <multiplicity>'", lineno
            )
        try:
            multiplicity = int(tokens[1])
        except ValueError:
            raise ParseError(
                f"bad multiplicity {tokens[1]!r}", lineno
            ) from None
        graph.index_of(tokens[0])
        pairs.append((tokens[0], multiplicity))
    return VortexConfig(tuple(pairs))


def serialize_solution_csv(
    graph: WeightedGraph, vortices: VortexConfig, u: VertexFunction
) -> str:
    """Solution table with per-vertex value, density, and equation residual."""
    res = pointwise_residual(graph, vortices, u).values
    rows = ["vertex,u,exp_u,residual"]
    for i, vid in enumerate(graph.vertices):
        ui = float(u.values[i])
        rows.append(f"{vid},{ui!r},{float(np.exp(ui))!r},{float(res[i])!r}")
    return "\n".join(rows) + "\n"


def parse_solution_csv(text: str) -> dict[str, tuple[float, float, float]]:
    """Read a solution CSV back into {vertex: (u, exp_u, residual)}."""
    lines = text.splitlines()
    if not lines or lines[0] != "vertex,u,exp_u,residual":
        raise ParseError("missing solution header", 1)
    table: dict[str, tuple[float, float, float]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ParseError("solution rows need 4 fields", lineno)
        table[fields[0]] = (
            _parse_float(fields[1], "u", lineno),
            _parse_float(fields[2], "exp_u", lineno),
            _parse_float(fields[3], "residual", lineno),
        )
    return table


def serialize_trace(sup_diffs: list[float]) -> str:
    """Iteration trace: one 'iteration sup_diff' pair per line."""
    return "".join(
        f"{k} {float(d)!r}\n" for k, d in enumerate(sup_diffs, start=1)
    )
