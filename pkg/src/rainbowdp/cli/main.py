"""Subcommand dispatcher.

Exit codes: 0 ok, 1 usage or malformed input, 2 privacy/boundary
violation, 3 unconstrained region, 4 incomplete input, 5 falsification
found.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from ..core import PrivacyBudget, SimplexVector
from ..graph import UnconstrainedRegion
from ..mechanism import (
    EpsilonZero,
    InvalidBoundary,
    Mechanism,
    MissingRainbow,
    build_trajectory,
    optimal_mechanism,
    tau_profile,
    verify_dp,
)
from ..oracle import (
    _drop_delta_step,
    dominance_falsify,
    homogenized_pentagon,
    no_optimal_demo,
)
from .graphfile import parse_graph_file
from .svg import render_trajectory_svg
from .tables import (
    fmt,
    mechanism_csv,
    parse_mechanism_csv,
    parse_trajectory_csv,
    trajectory_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_UNCONSTRAINED = 3
EXIT_INCOMPLETE = 4
EXIT_FALSIFIED = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_budget_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--epsilon", type=float, help="privacy parameter epsilon")
    group.add_argument(
        "--e-epsilon",
        dest="e_epsilon",
        type=float,
        help="e^epsilon; sets epsilon = log of this value",
    )
    parser.add_argument("--delta", type=float, default=0.0, help="privacy parameter delta")


def _budget_from_args(args, default_epsilon: float | None = None) -> PrivacyBudget:
    if args.epsilon is not None:
        eps = args.epsilon
    elif args.e_epsilon is not None:
        if args.e_epsilon < 1.0:
            raise ValueError("--e-epsilon must be >= 1")
        eps = math.log(args.e_epsilon)
    elif default_epsilon is not None:
        eps = default_epsilon
    else:
        raise ValueError("a budget requires --epsilon or --e-epsilon")
    return PrivacyBudget(eps, args.delta)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_build(args) -> int:
    try:
        budget = _budget_from_args(args)
        gf = parse_graph_file(_read_text(args.graph_file))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if gf.boundary is None:
        print("error: graph file declares no boundary vectors", file=sys.stderr)
        return EXIT_INCOMPLETE
    try:
        mech = optimal_mechanism(gf.graph, gf.boundary, budget)
    except MissingRainbow as exc:
        print(f"error: {exc}", file=sys.stderr)
        for c in exc.rainbows:
            print("  missing rainbow " + ",".join(c.color_names(gf.graph.color_space)), file=sys.stderr)
        return EXIT_INCOMPLETE
    except InvalidBoundary as exc:
        print(f"error: {exc}", file=sys.stderr)
        space = gf.graph.color_space
        for ca, cb in exc.violations:
            a = ",".join(ca.color_names(space))
            b = ",".join(cb.color_names(space))
            print(f"  boundary values for ({a}) and ({b}) are not close", file=sys.stderr)
        return EXIT_VIOLATION
    except UnconstrainedRegion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONSTRAINED
    _write_text(args.out, mechanism_csv(gf.graph, mech))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        budget = _budget_from_args(args)
        gf = parse_graph_file(_read_text(args.graph_file))
        assignment = parse_mechanism_csv(_read_text(args.mechanism_file), gf.graph.color_space)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    unknown = sorted(set(assignment) - set(gf.graph.nodes))
    if unknown:
        print(f"error: mechanism file has rows for undeclared nodes: {unknown}", file=sys.stderr)
        return EXIT_USAGE
    missing = sorted(set(gf.graph.nodes) - set(assignment))
    if missing:
        print(f"error: mechanism file is missing nodes: {missing}", file=sys.stderr)
        return EXIT_INCOMPLETE
    mech = Mechanism(assignment, gf.graph.color_space)
    report = verify_dp(gf.graph, mech, budget)
    if report.valid:
        print("valid")
        return EXIT_OK
    for v in report.violations:
        print(
            f"violation edge=({v.edge[0]},{v.edge[1]}) "
            f"direction={v.direction[0]}->{v.direction[1]} margin={fmt(v.margin)}"
        )
    return EXIT_VIOLATION


def cmd_trajectory(args) -> int:
    try:
        budget = _budget_from_args(args)
        probs = tuple(float(tok) for tok in args.boundary.split(","))
        m = SimplexVector(probs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.steps < 0 or args.substeps < 1:
        print("error: need steps >= 0 and substeps >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        profile = tau_profile(m, budget)
        print("rho " + fmt(profile.rho))
        print("tau " + ",".join("inf" if math.isinf(v) else str(int(v)) for v in profile.tau))
    except EpsilonZero:
        profile = None
        print("rho n/a (epsilon=0)")
        print("tau n/a (epsilon=0)")
    table = build_trajectory(m, budget, args.steps, args.substeps)
    _write_text(args.out, trajectory_csv(table, profile))
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        table, _, tau = parse_trajectory_csv(_read_text(args.trajectory_csv))
        svg = render_trajectory_svg(table, tau)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write_text(args.out, svg)
    return EXIT_OK


def cmd_demo_no_optimal(args) -> int:
    try:
        budget = _budget_from_args(args, default_epsilon=math.log(2.0))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.homogenized:
        try:
            graph, mech = homogenized_pentagon(budget)
        except InvalidBoundary as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VIOLATION
        report = verify_dp(graph, mech, budget)
        print("optimal mechanism on the homogenized pentagon:")
        sys.stdout.write(mechanism_csv(graph, mech))
        print(f"verifies: {str(report.valid).lower()}")
        return EXIT_OK if report.valid else EXIT_VIOLATION
    report = no_optimal_demo(budget)
    print(f"mech1 valid: {str(report.mech1_valid).lower()}")
    print(f"mech2 valid: {str(report.mech2_valid).lower()}")
    print(f"forced mech3 valid: {str(report.mech3_valid).lower()}")
    if report.violating_edge is not None:
        a, b = report.violating_edge
        print(f"violating edge: ({a},{b}) margin {fmt(report.margin)}")
    print(f"boundary homogeneous: {str(report.boundary_homogeneous).lower()}")
    expected = report.mech1_valid and report.mech2_valid and not report.mech3_valid
    return EXIT_OK if expected else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    try:
        budget = _budget_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not 2 <= args.q <= 12:
        print("error: need 2 <= q <= 12", file=sys.stderr)
        return EXIT_USAGE
    if args.trials < 1:
        print("error: need trials >= 1", file=sys.stderr)
        return EXIT_USAGE
    step_fn = _drop_delta_step if args.mutant_drop_delta else None
    for i in range(args.trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((args.seed, i))))
        p = SimplexVector(tuple(rng.dirichlet(np.ones(args.q))))
        report = dominance_falsify(
            p, budget, trials=args.samples, seed=args.seed * 1_000_003 + i, step_fn=step_fn
        )
        if report.counterexample is not None:
            ce = report.counterexample
            print(
                json.dumps(
                    {
                        "trial": i,
                        "p": [fmt(x) for x in p],
                        "sample": [fmt(x) for x in ce.vector],
                        "prefix_index": ce.prefix_index,
                        "margin": fmt(ce.margin),
                        "seed": args.seed,
                    },
                    sort_keys=True,
                )
            )
            print(
                f"fuzz q={args.q} trials={args.trials} seed={args.seed} "
                f"epsilon={fmt(budget.epsilon)} delta={fmt(budget.delta)} "
                f"samples={args.samples} result=counterexample trial={i}"
            )
            return EXIT_FALSIFIED
    print(
        f"fuzz q={args.q} trials={args.trials} seed={args.seed} "
        f"epsilon={fmt(budget.epsilon)} delta={fmt(budget.delta)} "
        f"samples={args.samples} result=ok"
    )
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="rainbow-dp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct the optimal mechanism for a graph file")
    p.add_argument("graph_file")
    _add_budget_flags(p, required=True)
    p.add_argument("--out", required=True, help="output mechanism CSV path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check a mechanism CSV against a graph file")
    p.add_argument("graph_file")
    p.add_argument("mechanism_file")
    _add_budget_flags(p, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", help="emit the closed-form trajectory of a boundary vector")
    p.add_argument("--boundary", required=True, help="comma-separated probabilities, preference order")
    _add_budget_flags(p, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--substeps", type=int, default=1, help="samples per unit t")
    p.add_argument("--out", required=True, help="output trajectory CSV path")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("plot", help="render a trajectory CSV as a standalone SVG")
    p.add_argument("trajectory_csv")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser(
        "demo-no-optimal",
        help="run the pentagon demonstration (no optimal mechanism for a non-homogeneous boundary)",
    )
    _add_budget_flags(p, required=False)
    p.add_argument(
        "--homogenized",
        action="store_true",
        help="build and print the optimal mechanism on the homogenized pentagon instead",
    )
    p.set_defaults(func=cmd_demo_no_optimal)

    p = sub.add_parser("fuzz", help="randomized dominance falsification runs")
    p.add_argument("--q", type=int, required=True, help="alphabet size, 2..12")
    p.add_argument("--trials", type=int, default=100, help="number of random start distributions")
    p.add_argument("--seed", type=int, default=0)
    _add_budget_flags(p, required=True)
    p.add_argument("--samples", type=int, default=64, help="close samples tested per trial")
    p.add_argument("--mutant-drop-delta", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_fuzz)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
