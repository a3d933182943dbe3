"""Command line interface.

Thin client over the library: each subcommand parses files, calls the core
functions, and prints deterministic text (floats use shortest round-trip
form, so identical inputs give byte-identical outputs).

Exit codes: 0 success, 1 input or I/O problems, 2 provably no solution,
3 numerical failure (iteration cap or solver divergence).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import formats
from .errors import (
    GraphVortexError,
    MaxItersExceeded,
    NoSolution,
    SolverDivergence,
)
from .generators import GraphSpec, build
from .linalg import LinearSolveSettings
from .solver import (
    FOUR_PI,
    SolverSettings,
    VortexConfig,
    existence_check,
    newton_oracle,
    resolve_source,
    solve,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_SOLUTION = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    # usage problems are input problems; keep exit code 2 for NO_SOLUTION
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphvortex",
                     description="vortex equation solver on weighted graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a generated graph file")
    gen.add_argument("--kind", required=True,
                     choices=["path", "cycle", "complete", "grid2d", "random_gnp"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--p", type=float)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--weight", type=float, default=1.0)
    gen.add_argument("--measure", type=float, default=1.0)
    gen.add_argument("--out", required=True, help="output graph file path")
    gen.set_defaults(func=cmd_generate)

    chk = sub.add_parser("check", help="existence verdict for a vortex set")
    chk.add_argument("--graph", required=True)
    chk.add_argument("--vortices", required=True)
    chk.set_defaults(func=cmd_check)

    slv = sub.add_parser("solve", help="solve and write the solution CSV")
    slv.add_argument("--graph", required=True)
    slv.add_argument("--vortices", required=True)
    slv.add_argument("--tol", type=float, default=1e-10)
    slv.add_argument("--max-iters", type=int, default=10000)
    slv.add_argument("--out", required=True, help="solution CSV path")
    slv.add_argument("--trace", help="optional iteration trace path")
    slv.add_argument("--oracle", choices=["none", "newton"], default="none")
    slv.set_defaults(func=cmd_solve)

    swp = sub.add_parser("sweep", help="margin and solution survey over n")
    swp.add_argument("--graph", required=True)
    swp.add_argument("--vertex", required=True)
    swp.add_argument("--n-max", type=int, required=True)
    swp.add_argument("--tol", type=float, default=1e-10)
    swp.add_argument("--max-iters", type=int, default=10000)
    swp.set_defaults(func=cmd_sweep)

    return parser


def _settings(args) -> SolverSettings:
    return SolverSettings(
        conv_tol=args.tol,
        max_iters=args.max_iters,
        linear=LinearSolveSettings(),
    )


def cmd_generate(args) -> int:
    spec = GraphSpec(kind=args.kind, n=args.n, rows=args.rows, cols=args.cols,
                     p=args.p, seed=args.seed, weight=args.weight,
                     measure=args.measure)
    graph = build(spec)
    Path(args.out).write_text(formats.serialize_graph(graph))
    print(f"wrote {args.out} ({graph.vertex_count} vertices, "
          f"{graph.edge_count} edges)")
    return EXIT_OK


def cmd_check(args) -> int:
    graph = formats.parse_graph(Path(args.graph).read_text())
    vortices = formats.parse_vortices(Path(args.vortices).read_text(), graph)
    margin = existence_check(graph, vortices)
    print(f"volume {float(graph.total_volume)!r}")
    print(f"four_pi_N {float(FOUR_PI * vortices.total_n)!r}")
    print(f"margin {float(margin)!r}")
    if margin > 0.0:
        print("verdict SOLVABLE")
        return EXIT_OK
    print("verdict NO_SOLUTION")
    return EXIT_NO_SOLUTION


def cmd_solve(args) -> int:
    graph = formats.parse_graph(Path(args.graph).read_text())
    vortices = formats.parse_vortices(Path(args.vortices).read_text(), graph)
    settings = _settings(args)
    report = solve(graph, vortices, settings)
    Path(args.out).write_text(
        formats.serialize_solution_csv(graph, vortices, report.solution)
    )
    if args.trace:
        Path(args.trace).write_text(
            formats.serialize_trace(report.trace.sup_diffs)
        )
    print(f"residual_sup {float(report.residual_sup)!r}")
    print(f"integral_gap {float(report.integral_gap)!r}")
    print(f"iterations {report.trace.iterations}")
    if args.oracle == "newton":
        source = resolve_source(graph, settings)
        check = newton_oracle(graph, report.background, source,
                              vortices.total_n, settings)
        gap = float(np.max(np.abs(check.values - report.regular_part.values)))
        print(f"oracle_sup_diff {gap!r}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    graph = formats.parse_graph(Path(args.graph).read_text())
    graph.index_of(args.vertex)
    if args.n_max < 1:
        print("error: --n-max must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    settings = _settings(args)
    print("n,four_pi_n,margin,verdict,iterations,min_u,max_u")
    for n in range(1, args.n_max + 1):
        vortices = VortexConfig(((args.vertex, n),))
        margin = existence_check(graph, vortices)
        four_pi_n = FOUR_PI * n
        if margin <= 0.0:
            print(f"{n},{float(four_pi_n)!r},{float(margin)!r},NO_SOLUTION,,,")
            continue
        report = solve(graph, vortices, settings)
        u = report.solution.values
        print(f"{n},{float(four_pi_n)!r},{float(margin)!r},SOLVABLE,"
              f"{report.trace.iterations},{float(np.min(u))!r},"
              f"{float(np.max(u))!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NoSolution as exc:
        print(f"margin {float(exc.margin)!r}", file=sys.stderr)
        print("verdict NO_SOLUTION", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except (MaxItersExceeded, SolverDivergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GraphVortexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
