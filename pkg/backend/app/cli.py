"""
Command-line entry point for envy-free orientations with subsidies.

Usage examples:
  orient-subsidy gen --family parallel-pairs --pairs 2 --output pairs.json
  orient-subsidy solve --instance pairs.json --algo binary
  orient-subsidy verify --instance pairs.json --solution solution.json
  orient-subsidy oracle --instance pairs.json --max-edges 20 --jobs 4
  orient-subsidy compare --instance pairs.json
  orient-subsidy gen --family sat --formula formula.cnf

Exit codes: 0 success, 1 verification failure or internal invariant violation,
2 input error, 3 precondition failure.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .core.config import settings
from .core.errors import InputError, OrientationError
from .core.log_config import setup_logging
from .models.instance import Instance
from .services import instance_service
from .services.oracle_service import brute_force_min_subsidy, verify_solution
from .services.solver_service import Algorithm, solver_service
from .utils.serialization import (
    dump_json,
    format_rational,
    instance_from_dict,
    instance_to_dict,
    load_json,
    oracle_to_dict,
    report_to_dict,
    solution_from_dict,
    solution_to_dict,
)

logger = logging.getLogger(__name__)

FAMILIES = ("parallel-pairs", "threshold-clique", "appendix-path", "random", "sat", "locally-efable-cycle")


def _load_instance(path: Optional[str]) -> Instance:
    return instance_from_dict(load_json(path))


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    solution = solver_service.solve(instance, args.algo)
    dump_json(solution_to_dict(solution), args.output)
    return 0


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    solution = solution_from_dict(load_json(args.solution))
    report = verify_solution(instance, solution)
    dump_json(report_to_dict(report), args.output)
    if not report.all_pass:
        logger.warning("Verification failed: %s", {k: v for k, v in report.checks.items() if not v})
        return 1
    return 0


def cmd_oracle(args) -> int:
    instance = _load_instance(args.instance)
    result = brute_force_min_subsidy(instance, max_edges=args.max_edges, jobs=args.jobs)
    dump_json(oracle_to_dict(result), args.output)
    return 0


def _generate(args) -> Instance:
    family = args.family
    if family == "parallel-pairs":
        return instance_service.gen_parallel_pairs(args.pairs)
    if family == "threshold-clique":
        return instance_service.gen_threshold_clique(args.n)
    if family == "appendix-path":
        return instance_service.gen_appendix_path(Fraction(args.epsilon))
    if family == "random":
        return instance_service.gen_random(
            args.seed, args.n, args.m, args.kind, simple=args.simple, cover=args.cover
        )
    if family == "locally-efable-cycle":
        instance, _ = instance_service.gen_locally_efable_cycle()
        return instance
    if args.formula:
        try:
            with open(args.formula, "r") as f:
                formula = instance_service.parse_dimacs(f.read())
        except OSError as err:
            raise InputError(f"cannot read {args.formula}: {err}") from err
    else:
        formula = instance_service.random_2p2n_formula(args.seed, args.n_vars)
    return instance_service.gen_from_2p2n3sat(formula)


def cmd_gen(args) -> int:
    dump_json(instance_to_dict(_generate(args)), args.output)
    return 0


def compare_rows(instance: Instance, max_edges: Optional[int] = None, jobs: Optional[int] = None) -> list[dict]:
    """One row per applicable solver, with the oracle optimum when the instance is small enough."""
    optimum = None
    limit = settings.ORACLE_MAX_EDGES if max_edges is None else max_edges
    if instance.m <= limit:
        optimum = brute_force_min_subsidy(instance, max_edges=limit, jobs=jobs).min_total

    rows = []
    for algo in solver_service.applicable(instance):
        solution = solver_service.solve(instance, algo.value)
        total, bound = solution.total_subsidy, solution.bound
        rows.append({
            "algorithm": algo.value,
            "total": format_rational(total),
            "bound": None if bound is None else format_rational(bound),
            "within_bound": bound is None or total <= bound,
            "gap_to_optimum": None if optimum is None else format_rational(total - optimum),
        })
    if optimum is not None:
        rows.append({
            "algorithm": "oracle",
            "total": format_rational(optimum),
            "bound": None,
            "within_bound": True,
            "gap_to_optimum": "0",
        })
    return rows


def cmd_compare(args) -> int:
    import pandas as pd

    rows = compare_rows(_load_instance(args.instance), max_edges=args.max_edges, jobs=args.jobs)
    if args.json:
        dump_json(rows, args.output)
    else:
        text = pd.DataFrame(rows).to_string(index=False)
        if args.output:
            with open(args.output, "w") as f:
                f.write(text + "\n")
        else:
            print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("backend.app.main:app", host=args.host, port=args.port, log_level=settings.LOG_LEVEL.lower())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orient-subsidy", description="Envy-free graph orientations with subsidies")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def io(p, needs_instance: bool = True):
        if needs_instance:
            p.add_argument("--instance", default=None, help="Instance JSON path (stdin when omitted)")
        p.add_argument("--output", default=None, help="Output path (stdout when omitted)")

    p = sub.add_parser("solve", help="Compute an EF orientation with payments")
    io(p)
    p.add_argument("--algo", default=settings.DEFAULT_ALGO, choices=[a.value for a in Algorithm])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="Check a solution against an instance")
    io(p)
    p.add_argument("--solution", required=True, help="Solution JSON path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="Minimum subsidy by exhaustive enumeration")
    io(p)
    p.add_argument("--max-edges", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="Generate an instance")
    io(p, needs_instance=False)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--pairs", type=int, default=2)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--epsilon", default="1/100")
    p.add_argument("--kind", default="additive-unit", choices=instance_service.RANDOM_KINDS)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--cover", action="store_true", help="Touch every agent with a value-1 edge")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--formula", default=None, help="DIMACS file for --family sat")
    p.add_argument("--n-vars", type=int, default=3, help="Random 2P2N formula size when no --formula")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare", help="Run every applicable solver and the oracle")
    io(p)
    p.add_argument("--max-edges", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--json", action="store_true", help="Emit rows as JSON instead of a table")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", default=settings.API_HOST)
    p.add_argument("--port", type=int, default=settings.API_PORT)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)
    try:
        return args.func(args)
    except OrientationError as err:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(json.dumps(err.to_dict()) + "\n")
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
