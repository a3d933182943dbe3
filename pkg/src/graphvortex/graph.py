"""Weighted finite graphs and the discrete calculus built on them.

A graph here is a connected finite set of vertices with a strictly positive
measure ``mu`` on vertices and strictly positive symmetric weights ``w`` on
edges.  The volume of the graph is ``|V| = sum_x mu(x)``.  The operators
follow the standard graph conventions:

    laplacian(u)(x)     = (1/mu(x)) * sum_{y ~ x} w_xy * (u(y) - u(x))
    gradient_form(u,v)(x) = (1/(2 mu(x))) * sum_{y ~ x} w_xy (u(y)-u(x))(v(y)-v(x))
    integrate(u)        = sum_x mu(x) u(x)

Graphs and vertex functions are immutable after construction and safe to
share between threads; every operation returns a fresh object.  Edge data is
stored sorted by vertex index and all sums run in index order, so repeated
runs on the same input produce bit-identical results.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    DuplicateVertexId,
    EmptyGraph,
    GraphMismatch,
    InvalidExponent,
    NonPositiveMeasure,
    NonPositiveWeight,
    SelfLoop,
    UnknownVertex,
)

__all__ = [
    "WeightedGraph",
    "VertexFunction",
    "validate_graph",
    "laplacian",
    "gradient_form",
    "gradient_norm",
    "integrate",
    "lp_norm",
    "dirac",
]


def _positive_finite(value) -> bool:
    try:
        v = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(v) and v > 0.0


class WeightedGraph:
    """Connected weighted graph with a positive vertex measure.

    Construction validates everything: non-empty vertex listing, unique
    identifiers, positive finite measures and weights, no self loops, no
    conflicting duplicate edges, and connectivity.  A single directed entry
    ``(a, b, w)`` denotes the symmetric edge; the pair may also be listed in
    both directions provided the weights agree exactly.

    Parameters
    ----------
    vertices : sequence of (id, measure) pairs
    edges : sequence of (id, id, weight) triples
    """

    __slots__ = (
        "vertices",
        "measure",
        "edges",
        "total_volume",
        "_index",
        "_adj",
        "_deg",
        "_rows",
        "_cols",
        "_wboth",
    )

    def __init__(
        self,
        vertices: Sequence[tuple[str, float]],
        edges: Iterable[tuple[str, str, float]] = (),
    ):
        vertex_rows = list(vertices)
        if not vertex_rows:
            raise EmptyGraph("graph must contain at least one vertex")

        ids: list[str] = []
        index: dict[str, int] = {}
        mu = np.empty(len(vertex_rows), dtype=np.float64)
        for pos, (vid, m) in enumerate(vertex_rows):
            vid = str(vid)
            if vid in index:
                raise DuplicateVertexId(f"vertex {vid!r} listed twice")
            if not _positive_finite(m):
                raise NonPositiveMeasure(
                    f"vertex {vid!r} has measure {m!r}; a positive finite real is required"
                )
            index[vid] = pos
            ids.append(vid)
            mu[pos] = float(m)

        n = len(ids)
        seen: dict[tuple[int, int], tuple[float, int]] = {}
        for a, b, w in edges:
            a, b = str(a), str(b)
            for vid in (a, b):
                if vid not in index:
                    raise UnknownVertex(f"edge endpoint {vid!r} is not a vertex")
            if a == b:
                raise SelfLoop(f"self loop at vertex {a!r}")
            if not _positive_finite(w):
                raise NonPositiveWeight(
                    f"edge {a!r} {b!r} has weight {w!r}; a positive finite real is required"
                )
            i, j = index[a], index[b]
            key = (i, j) if i < j else (j, i)
            w = float(w)
            if key in seen:
                prev_w, count = seen[key]
                if count >= 2:
                    raise DuplicateEdge(f"edge {a!r} {b!r} listed more than twice")
                if prev_w != w:
                    raise DuplicateEdge(
                        f"edge {a!r} {b!r} listed twice with unequal weights"
                    )
                seen[key] = (w, count + 1)
            else:
                seen[key] = (w, 1)

        edge_list = tuple(sorted((i, j, w) for (i, j), (w, _) in seen.items()))

        # symmetric entry arrays sorted by (row, col); all accumulations below
        # iterate in this fixed order
        m2 = 2 * len(edge_list)
        rows = np.empty(m2, dtype=np.int64)
        cols = np.empty(m2, dtype=np.int64)
        wboth = np.empty(m2, dtype=np.float64)
        half = [(i, j, w) for (i, j, w) in edge_list] + [
            (j, i, w) for (i, j, w) in edge_list
        ]
        half.sort()
        for pos, (i, j, w) in enumerate(half):
            rows[pos], cols[pos], wboth[pos] = i, j, w

        adj = sp.csr_matrix((wboth, (rows, cols)), shape=(n, n))
        adj.sort_indices()
        deg = np.bincount(rows, weights=wboth, minlength=n)

        if n > 1:
            neighbors: list[list[int]] = [[] for _ in range(n)]
            for i, j, _ in edge_list:
                neighbors[i].append(j)
                neighbors[j].append(i)
            reached = np.zeros(n, dtype=bool)
            queue = deque([0])
            reached[0] = True
            while queue:
                x = queue.popleft()
                for y in neighbors[x]:
                    if not reached[y]:
                        reached[y] = True
                        queue.append(y)
            if not reached.all():
                missing = ids[int(np.flatnonzero(~reached)[0])]
                raise DisconnectedGraph(
                    f"graph is not connected: vertex {missing!r} unreachable from {ids[0]!r}"
                )

        mu.setflags(write=False)
        deg.setflags(write=False)
        self.vertices = tuple(ids)
        self.measure = mu
        self.edges = edge_list
        self.total_volume = float(np.sum(mu))
        self._index = index
        self._adj = adj
        self._deg = deg
        self._rows = rows
        self._cols = cols
        self._wboth = wboth

    # basic queries

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._index

    def index_of(self, vertex_id: str) -> int:
        try:
            return self._index[vertex_id]
        except KeyError:
            raise UnknownVertex(f"vertex {vertex_id!r} is not in the graph") from None

    def iter_edges(self) -> Iterable[tuple[str, str, float]]:
        """Yield edges as (id, id, weight) in canonical index order."""
        for i, j, w in self.edges:
            yield self.vertices[i], self.vertices[j], w

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and np.array_equal(self.measure, other.measure)
            and self.edges == other.edges
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"<WeightedGraph n={self.vertex_count} m={self.edge_count} "
            f"volume={self.total_volume!r}>"
        )


def validate_graph(
    vertices: Sequence[tuple[str, float]],
    edges: Iterable[tuple[str, str, float]] = (),
) -> WeightedGraph:
    """Validate a raw listing and return the immutable graph."""
    return WeightedGraph(vertices, edges)


class VertexFunction:
    """Immutable real-valued function on the vertices of one graph.

    Values are stored as a read-only float64 array aligned with the owning
    graph's vertex order.  All values must be finite.
    """

    __slots__ = ("graph", "values")

    def __init__(self, graph: WeightedGraph, values):
        arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
        if arr.shape[0] != graph.vertex_count:
            raise GraphMismatch(
                f"function has {arr.shape[0]} values but the graph has "
                f"{graph.vertex_count} vertices"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("vertex function values must be finite")
        arr.setflags(write=False)
        self.graph = graph
        self.values = arr

    @classmethod
    def constant(cls, graph: WeightedGraph, value: float) -> "VertexFunction":
        return cls(graph, np.full(graph.vertex_count, float(value)))

    def value_at(self, vertex_id: str) -> float:
        return float(self.values[self.graph.index_of(vertex_id)])

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"<VertexFunction n={len(self)} sup={float(np.max(np.abs(self.values)))!r}>"


def _check_owned(graph: WeightedGraph, *functions: VertexFunction) -> None:
    for f in functions:
        if f.graph is not graph:
            raise GraphMismatch("vertex function does not belong to this graph")


def _lap_values(graph: WeightedGraph, x: np.ndarray) -> np.ndarray:
    # difference form: constants are annihilated exactly
    du = x[graph._cols] - x[graph._rows]
    acc = np.bincount(graph._rows, weights=graph._wboth * du,
                      minlength=graph.vertex_count)
    return acc / graph.measure


def laplacian(graph: WeightedGraph, u: VertexFunction) -> VertexFunction:
    """Graph Laplacian of ``u``: weighted neighbor differences over mu."""
    _check_owned(graph, u)
    return VertexFunction(graph, _lap_values(graph, u.values))


def gradient_form(
    graph: WeightedGraph, u: VertexFunction, v: VertexFunction
) -> VertexFunction:
    """Pointwise carre du champ of two functions.

    Computed edgewise from products of differences, so the form is exactly
    symmetric in its arguments, vanishes exactly against constants, and
    gradient_form(u, u) is a sum of squares, never negative.
    """
    _check_owned(graph, u, v)
    du = u.values[graph._cols] - u.values[graph._rows]
    dv = v.values[graph._cols] - v.values[graph._rows]
    # grouping (du*dv) first keeps the form bitwise symmetric in u, v
    acc = np.bincount(graph._rows, weights=graph._wboth * (du * dv),
                      minlength=graph.vertex_count)
    return VertexFunction(graph, acc / (2.0 * graph.measure))


def gradient_norm(graph: WeightedGraph, u: VertexFunction) -> VertexFunction:
    """Pointwise gradient length sqrt(gradient_form(u, u))."""
    g2 = gradient_form(graph, u, u).values
    return VertexFunction(graph, np.sqrt(g2))


def integrate(graph: WeightedGraph, u: VertexFunction) -> float:
    """Integral of ``u`` against the vertex measure."""
    _check_owned(graph, u)
    return float(np.sum(graph.measure * u.values))


def lp_norm(graph: WeightedGraph, u: VertexFunction, p: float) -> float:
    """L^p norm with respect to mu for p >= 1; p = inf is the plain sup norm."""
    _check_owned(graph, u)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"norm exponent must satisfy p >= 1, got {p!r}")
    absu = np.abs(u.values)
    if math.isinf(p):
        return float(np.max(absu))
    return float(np.sum(graph.measure * absu**p) ** (1.0 / p))


def dirac(graph: WeightedGraph, vertex_id: str) -> VertexFunction:
    """Dirac mass at a vertex: 1/mu there, zero elsewhere; unit integral."""
    i = graph.index_of(vertex_id)
    vals = np.zeros(graph.vertex_count)
    vals[i] = 1.0 / graph.measure[i]
    return VertexFunction(graph, vals)
