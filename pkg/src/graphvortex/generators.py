"""Deterministic graph family generators.

Five families are supported: ``path``, ``cycle``, ``complete``, ``grid2d``
and ``random_gnp``.  Vertex identifiers are ``v0 .. v{n-1}`` except for the
grid, which uses ``r{i}c{j}``.  All weights and measures are the constants
given in the spec object.

Random graphs use SplitMix64, a fixed portable 64-bit generator, so the same
seed reproduces the same graph on any platform or implementation.  The
update is

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state;  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9  (mod 2^64)
    z ^= z >> 27;  z *= 0x94D049BB133111EB  (mod 2^64)
    z ^= z >> 31

and uniforms in [0, 1) are ``(z >> 11) / 2^53``.  Edge coins are drawn in
lexicographic pair order (0,1), (0,2), ..., (n-2, n-1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConnectivityRetriesExhausted, DisconnectedGraph, InvalidSpec
from .graph import WeightedGraph, validate_graph

__all__ = ["GraphSpec", "build", "KINDS"]

KINDS = ("path", "cycle", "complete", "grid2d", "random_gnp")

_MASK64 = 0xFFFFFFFFFFFFFFFF


class _SplitMix64:
    """SplitMix64 stream; see the module docstring for the exact update."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) / 9007199254740992.0  # 2^53


@dataclass(frozen=True)
class GraphSpec:
    """Request for one generated graph.

    kind-specific parameters: ``n`` (path, cycle, complete, random_gnp),
    ``rows``/``cols`` (grid2d), ``p`` and ``seed`` (random_gnp).  ``weight``
    and ``measure`` are applied uniformly.
    """

    kind: str
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    p: float | None = None
    seed: int = 0
    weight: float = 1.0
    measure: float = 1.0


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidSpec(message)


def _int_param(spec: GraphSpec, name: str, minimum: int) -> int:
    value = getattr(spec, name)
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{spec.kind} needs an integer {name}")
    _require(value >= minimum, f"{spec.kind} needs {name} >= {minimum}")
    return value


def _vertex_rows(count: int, measure: float) -> list[tuple[str, float]]:
    return [(f"v{i}", measure) for i in range(count)]


def build(spec: GraphSpec, max_retries: int = 100) -> WeightedGraph:
    """Build the graph described by ``spec``.

    Generation is deterministic: equal specs produce equal graphs.  For
    ``random_gnp`` the edge coins come from SplitMix64 seeded with
    ``spec.seed``; a disconnected draw is retried with the seed incremented,
    at most ``max_retries`` times.
    """
    _require(spec.kind in KINDS, f"unknown graph kind {spec.kind!r}")
    _require(isinstance(spec.weight, (int, float)) and spec.weight > 0,
             "weight must be positive")
    _require(isinstance(spec.measure, (int, float)) and spec.measure > 0,
             "measure must be positive")
    w = float(spec.weight)

    if spec.kind == "path":
        n = _int_param(spec, "n", 1)
        edges = [(f"v{i}", f"v{i + 1}", w) for i in range(n - 1)]
        return validate_graph(_vertex_rows(n, spec.measure), edges)

    if spec.kind == "cycle":
        n = _int_param(spec, "n", 3)
        edges = [(f"v{i}", f"v{(i + 1) % n}", w) for i in range(n)]
        return validate_graph(_vertex_rows(n, spec.measure), edges)

    if spec.kind == "complete":
        n = _int_param(spec, "n", 1)
        edges = [(f"v{i}", f"v{j}", w)
                 for i in range(n) for j in range(i + 1, n)]
        return validate_graph(_vertex_rows(n, spec.measure), edges)

    if spec.kind == "grid2d":
        rows = _int_param(spec, "rows", 1)
        cols = _int_param(spec, "cols", 1)
        vertices = [(f"r{i}c{j}", float(spec.measure))
                    for i in range(rows) for j in range(cols)]
        edges = []
        for i in range(rows):
            for j in range(cols):
                if j + 1 < cols:
                    edges.append((f"r{i}c{j}", f"r{i}c{j + 1}", w))
                if i + 1 < rows:
                    edges.append((f"r{i}c{j}", f"r{i + 1}c{j}", w))
        return validate_graph(vertices, edges)

    # random_gnp
    n = _int_param(spec, "n", 1)
    _require(spec.p is not None and 0.0 < float(spec.p) <= 1.0,
             "random_gnp needs an edge probability p in (0, 1]")
    _require(isinstance(spec.seed, int) and not isinstance(spec.seed, bool),
             "random_gnp needs an integer seed")
    p = float(spec.p)
    vertices = _vertex_rows(n, spec.measure)
    for attempt in range(max_retries):
        rng = _SplitMix64(spec.seed + attempt)
        edges = [(f"v{i}", f"v{j}", w)
                 for i in range(n) for j in range(i + 1, n)
                 if rng.next_unit() < p]
        try:
            return validate_graph(vertices, edges)
        except DisconnectedGraph:
            continue
    raise ConnectivityRetriesExhausted(
        f"no connected draw in {max_retries} attempts "
        f"(n={n}, p={p!r}, seed={spec.seed})"
    )
