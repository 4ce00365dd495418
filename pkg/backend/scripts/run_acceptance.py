"""
Full-scale acceptance runs: solver bounds and optimality against the oracle on random instances,
the reduction biconditional, the tightness fixtures and the non-EF-able cycle regression.

Usage examples:
  python backend/scripts/run_acceptance.py
  python backend/scripts/run_acceptance.py --count 100 --only binary additive
  python backend/scripts/run_acceptance.py --output acceptance.csv
"""

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Tuple

import pandas as pd

# Ensure project root is on sys.path so `backend.*` imports work when run directly
PROJECT_ROOT = Path(__file__).resolve().parents[2]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from backend.app.core.config import settings
from backend.app.core.errors import OrientationError
from backend.app.core.log_config import setup_logging
from backend.app.services import instance_service
from backend.app.services.additive_solver import solve_additive_multigraph
from backend.app.services.binary_solver import solve_binary
from backend.app.services.envy_service import build_envy_graph, find_positive_cycle, is_envy_freeable
from backend.app.services.monotone_solver import solve_monotone_multigraph
from backend.app.services.oracle_service import brute_force_min_subsidy, ef_orientation_exists, verify_solution
from backend.app.services.simple_solver import solve_simple_monotone

logger = logging.getLogger("acceptance")

Check = Iterator[Tuple[bool, str]]


def binary_optimality(count: int) -> Check:
    for seed in range(count):
        n = 2 + seed % 7
        instance = instance_service.gen_random(seed, n, 1 + seed % 14, "binary")
        total = solve_binary(instance).total_subsidy
        optimum = brute_force_min_subsidy(instance).min_total
        yield total == optimum, f"seed {seed}: binary {total} vs oracle {optimum}"


def reduction_biconditional(count: int) -> Check:
    for seed in range(count):
        formula = instance_service.random_2p2n_formula(seed, 3 if seed % 2 else 6)
        satisfiable = instance_service.is_satisfiable(formula)
        exists = ef_orientation_exists(instance_service.gen_from_2p2n3sat(formula))
        yield satisfiable == exists, f"seed {seed}: satisfiable={satisfiable} ef_zero={exists}"


def monotone_bound(count: int) -> Check:
    for seed in range(count):
        n = 2 + seed % 7
        kind = "monotone-family" if seed % 2 else "additive-unit"
        instance = instance_service.gen_random(seed, n, max(n, 1 + seed % 16), kind)
        solution = solve_monotone_multigraph(instance)
        ok = (
            verify_solution(instance, solution).all_pass
            and all(p <= 1 for p in solution.payments.amounts)
            and solution.total_subsidy <= n - 1
        )
        yield ok, f"seed {seed}: total {solution.total_subsidy} with n={n}"


def additive_bound(count: int) -> Check:
    for seed in range(count):
        n = 2 + seed % 7
        instance = instance_service.gen_random(seed, n, n + seed % 9, "additive-unit")
        solution = solve_additive_multigraph(instance)
        ok = verify_solution(instance, solution).all_pass and solution.total_subsidy <= Fraction(n, 2)
        yield ok, f"seed {seed}: total {solution.total_subsidy} with n={n}"


def simple_bound(count: int) -> Check:
    for seed in range(count):
        n = 3 + seed % 7
        kind = "monotone-family" if seed % 2 else "bivalued12"
        m = max((n + 1) // 2, min(n * (n - 1) // 2, 1 + seed % 15))
        instance = instance_service.gen_random(seed, n, m, kind, simple=True, cover=True)
        solution = solve_simple_monotone(instance)
        zeros = sum(1 for p in solution.payments.amounts if p == 0)
        ok = (
            solution.algorithm == "simple-monotone"
            and verify_solution(instance, solution).all_pass
            and solution.total_subsidy <= n - 2
            and zeros >= 2
        )
        yield ok, f"seed {seed}: total {solution.total_subsidy}, {zeros} unpaid, via {solution.algorithm}"


def tightness_fixtures(count: int) -> Check:
    for pairs in range(1, 6):
        optimum = brute_force_min_subsidy(instance_service.gen_parallel_pairs(pairs)).min_total
        yield optimum == pairs, f"parallel pairs {pairs}: oracle {optimum}"
    optimum = brute_force_min_subsidy(instance_service.gen_threshold_clique(5)).min_total
    yield optimum == 3, f"threshold clique 5: oracle {optimum}"
    total = solve_additive_multigraph(instance_service.gen_appendix_path(Fraction(1, 100))).total_subsidy
    yield total <= Fraction(5, 2), f"appendix path: additive total {total}"


def cycle_regression(count: int) -> Check:
    instance, orientation = instance_service.gen_locally_efable_cycle()
    found = find_positive_cycle(build_envy_graph(instance, orientation))
    ok = not is_envy_freeable(instance, orientation) and found is not None and found[1] == 1
    yield ok, f"positive cycle {found}"


CRITERIA: Dict[str, Callable[[int], Check]] = {
    "binary": binary_optimality,
    "reduction": reduction_biconditional,
    "monotone": monotone_bound,
    "additive": additive_bound,
    "simple": simple_bound,
    "tightness": tightness_fixtures,
    "cycle": cycle_regression,
}


def run(names: List[str], count: int, formulas: int) -> pd.DataFrame:
    rows = []
    for name in names:
        start = time.time()
        runs, failures, first_failure = 0, 0, None
        try:
            for ok, detail in CRITERIA[name](formulas if name == "reduction" else count):
                runs += 1
                if not ok:
                    failures += 1
                    first_failure = first_failure or detail
                    logger.warning("%s failed: %s", name, detail)
        except OrientationError as err:
            failures += 1
            first_failure = f"{err.reason}: {err}"
            logger.exception("%s aborted", name)
        rows.append({
            "criterion": name,
            "runs": runs,
            "failures": failures,
            "status": "PASS" if failures == 0 else "FAIL",
            "seconds": round(time.time() - start, 2),
            "first_failure": first_failure or "",
        })
        logger.info("%s: %s runs, %s failures", name, runs, failures)
    return pd.DataFrame(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description="Acceptance runs for orient-subsidy")
    parser.add_argument("--count", type=int, default=500, help="Random instances per bound criterion")
    parser.add_argument("--formulas", type=int, default=20, help="Random 2P2N formulas for the reduction check")
    parser.add_argument("--only", nargs="+", choices=list(CRITERIA), help="Subset of criteria (default: all)")
    parser.add_argument("--output", default=None, help="Also write the summary as CSV")
    args = parser.parse_args()

    setup_logging()
    settings.CHECK_INVARIANTS = True
    summary = run(args.only or list(CRITERIA), args.count, args.formulas)
    print(summary.to_string(index=False))
    if args.output:
        summary.to_csv(args.output, index=False)
    return 0 if (summary["failures"] == 0).all() else 1


if __name__ == "__main__":
    sys.exit(main())
