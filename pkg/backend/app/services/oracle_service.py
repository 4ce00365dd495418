"""Exhaustive ground truth for small instances.

Orientations are indexed by a binary counter over edge ids: bit ``e`` set means
edge ``e`` goes to its ``v`` endpoint. The first orientation found wins ties.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from joblib import Parallel, delayed

from ..core.config import settings
from ..core.errors import InputError, InvariantViolation, OracleRefusal
from ..models.instance import ZERO, Instance
from ..models.solution import Orientation, PaymentVector, Solution
from .envy_service import (
    build_envy_graph,
    is_ef_with_payments,
    is_envy_freeable,
    longest_path_payments,
    min_payments,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    min_total: Fraction
    argmin: Solution
    ef_zero_exists: bool
    visited: int


@dataclass
class VerificationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    total_subsidy: Optional[Fraction] = None
    details: dict[str, str] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return bool(self.checks) and all(self.checks.values())


def orientation_at(instance: Instance, index: int) -> Orientation:
    return Orientation(tuple(
        edge.v if (index >> edge.id) & 1 else edge.u for edge in instance.graph.edges
    ))


def _integer_scale(instance: Instance) -> Optional[int]:
    if not instance.valuations.is_additive:
        return None
    return math.lcm(1, *(val.denominator for val in instance.valuations.values.values()))


def _integer_payments(n: int, weights: list[list[int]]) -> Optional[list[int]]:
    p = [0] * n
    for _ in range(n + 1):
        relaxed = list(p)
        for i in range(n):
            row = weights[i]
            for j in range(n):
                if j != i and row[j] + p[j] > relaxed[i]:
                    relaxed[i] = row[j] + p[j]
        if relaxed == p:
            return p
        p = relaxed
    return None


def _scan_chunk(instance: Instance, start: int, stop: int, scale: Optional[int]) -> tuple:
    """Best (total, index) in [start, stop) plus whether a zero-payment EF orientation occurs."""
    n, edges = instance.n, instance.graph.edges
    if scale is not None:
        item = [
            (edge.u, edge.v, int(instance.item_value(edge.u, edge.id) * scale), int(instance.item_value(edge.v, edge.id) * scale))
            for edge in edges
        ]
    best_total, best_index, ef_zero = None, None, False
    for index in range(start, stop):
        if scale is not None:
            seen = [[0] * n for _ in range(n)]
            for e, (u, v, vu, vv) in enumerate(item):
                if (index >> e) & 1:
                    seen[v][v] += vv
                    seen[u][v] += vu
                else:
                    seen[u][u] += vu
                    seen[v][u] += vv
            weights = [[seen[i][j] - seen[i][i] for j in range(n)] for i in range(n)]
            payments = _integer_payments(n, weights)
            total = None if payments is None else Fraction(sum(payments), scale)
        else:
            payments = longest_path_payments(build_envy_graph(instance, orientation_at(instance, index)))
            total = None if payments is None else sum(payments, ZERO)
        if total is None:
            continue
        if total == 0:
            ef_zero = True
        if best_total is None or total < best_total:
            best_total, best_index = total, index
    return best_total, best_index, ef_zero, stop - start


def brute_force_min_subsidy(
    instance: Instance,
    max_edges: Optional[int] = None,
    jobs: Optional[int] = None,
) -> OracleResult:
    max_edges = settings.ORACLE_MAX_EDGES if max_edges is None else max_edges
    jobs = settings.ORACLE_JOBS if jobs is None else jobs
    if instance.m > max_edges:
        raise OracleRefusal(f"instance has {instance.m} edges, oracle limit is {max_edges}")

    space = 1 << instance.m
    chunk = settings.ORACLE_CHUNK_SIZE
    bounds = [(lo, min(lo + chunk, space)) for lo in range(0, space, chunk)]
    scale = _integer_scale(instance)
    logger.info("oracle: enumerating %s orientations in %s chunks (jobs=%s)", space, len(bounds), jobs)

    if jobs == 1 or len(bounds) == 1:
        results = [_scan_chunk(instance, lo, hi, scale) for lo, hi in bounds]
    else:
        results = Parallel(n_jobs=jobs)(delayed(_scan_chunk)(instance, lo, hi, scale) for lo, hi in bounds)

    found = [(total, index) for total, index, _, _ in results if total is not None]
    visited = sum(r[3] for r in results)
    if visited != space:
        raise InvariantViolation(f"enumeration visited {visited} of {space} orientations")
    if not found:
        raise InputError("no envy-freeable orientation exists")
    best_total, best_index = min(found)

    orientation = orientation_at(instance, best_index)
    payments = min_payments(instance, orientation)
    argmin = Solution(
        orientation=orientation,
        payments=payments,
        algorithm="oracle",
        bound=best_total,
        diagnostics={"index": best_index},
    )
    return OracleResult(
        min_total=best_total,
        argmin=argmin,
        ef_zero_exists=any(r[2] for r in results),
        visited=visited,
    )


def verify_solution(instance: Instance, solution: Solution) -> VerificationReport:
    report = VerificationReport()
    orientation, payments = solution.orientation, solution.payments
    try:
        orientation.validate(instance.graph)
        report.checks["orientation_valid"] = True
    except InputError as err:
        report.checks["orientation_valid"] = False
        report.details["orientation_valid"] = str(err)
        return report

    report.checks["payments_length"] = len(payments) == instance.n
    report.checks["payments_nonnegative"] = all(a >= 0 for a in payments.amounts)
    if not report.checks["payments_length"]:
        report.details["payments_length"] = f"{len(payments)} payments for {instance.n} agents"
        return report

    report.checks["envy_freeable"] = is_envy_freeable(instance, orientation)
    report.checks["ef_with_payments"] = is_ef_with_payments(instance, orientation, payments)
    report.total_subsidy = payments.total
    if solution.bound is not None:
        report.checks["within_bound"] = payments.total <= solution.bound
    return report


def iter_ef_orientations(instance: Instance) -> Iterator[Orientation]:
    """Every zero-subsidy EF orientation; each edge tries its u endpoint first.

    Backtracks over edges, those at low-degree vertices first, and prunes an
    agent once everything it could still end up with is worth less than what a
    neighbour already holds.
    """
    graph = instance.graph
    n = instance.n
    owner: list[Optional[int]] = [None] * instance.m
    held: list[list[int]] = [[] for _ in range(n)]
    # shown[x][j]: edges of E_xj currently owned by j
    shown: list[dict[int, list[int]]] = [dict() for _ in range(n)]
    unassigned: list[set[int]] = [set(graph.incident(a)) for a in range(n)]

    def hopeless(x: int) -> bool:
        ceiling = instance.value(x, held[x] + sorted(unassigned[x]))
        return any(instance.value(x, bundle) > ceiling for bundle in shown[x].values())

    degree = [len(graph.incident(a)) for a in range(n)]
    order = sorted(range(instance.m), key=lambda e: (min(degree[a] for a in graph.edges[e].endpoints), e))

    def search(position: int) -> Iterator[Orientation]:
        if position == instance.m:
            yield Orientation(tuple(owner))
            return
        e = order[position]
        edge = graph.edges[e]
        for o in (edge.u, edge.v):
            x = edge.other(o)
            owner[e] = o
            held[o].append(e)
            shown[x].setdefault(o, []).append(e)
            unassigned[o].discard(e)
            unassigned[x].discard(e)
            if not hopeless(x):
                yield from search(position + 1)
            unassigned[o].add(e)
            unassigned[x].add(e)
            shown[x][o].pop()
            held[o].pop()
            owner[e] = None

    yield from search(0)


def ef_orientation_exists(instance: Instance) -> bool:
    return next(iter_ef_orientations(instance), None) is not None


def permutation_efable(instance: Instance, orientation: Orientation) -> bool:
    """Envy-freeable iff no reassignment of the bundles raises the utilitarian welfare."""
    if instance.n > 6:
        raise InputError("permutation check is limited to 6 agents")
    bundles = orientation.bundles(instance.n)
    current = sum((instance.value(i, bundles[i]) for i in range(instance.n)), ZERO)
    return all(
        sum((instance.value(i, bundles[perm[i]]) for i in range(instance.n)), ZERO) <= current
        for perm in itertools.permutations(range(instance.n))
    )


def verify_payment_minimality(instance: Instance, orientation: Orientation, payments: PaymentVector) -> bool:
    """Each payment equals the heaviest simple path leaving its agent (floored at 0)."""
    if instance.n > 7:
        raise InputError("simple-path enumeration is limited to 7 agents")
    weight = build_envy_graph(instance, orientation).weight

    def heaviest(start: int) -> Fraction:
        best = ZERO
        stack = [(start, ZERO, frozenset([start]))]
        while stack:
            node, total, visited = stack.pop()
            best = max(best, total)
            for nxt in range(instance.n):
                if nxt not in visited:
                    stack.append((nxt, total + weight[node][nxt], visited | {nxt}))
        return best

    return all(payments[i] == heaviest(i) for i in range(instance.n))
