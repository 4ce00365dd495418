"""Envy graphs, envy-freeability and minimum subsidy payments.

An allocation is envy-freeable iff its envy graph has no positive-weight
cycle; the minimum payment of an agent is then the heaviest path leaving it.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx

from ..core.errors import NotEnvyFreeable
from ..models.instance import ZERO, Instance
from ..models.solution import Orientation, PaymentVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnvyGraph:
    n: int
    weight: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence]) -> "EnvyGraph":
        rows = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        return cls(len(rows), rows)


def build_envy_graph(instance: Instance, orientation: Orientation) -> EnvyGraph:
    bundles = orientation.bundles(instance.n)
    rows = []
    for i in range(instance.n):
        own = instance.value(i, bundles[i])
        rows.append(tuple(
            ZERO if j == i else instance.value(i, bundles[j]) - own
            for j in range(instance.n)
        ))
    return EnvyGraph(instance.n, tuple(rows))


def longest_path_payments(graph: EnvyGraph) -> Optional[list[Fraction]]:
    """Heaviest path weight from every vertex, floored at 0.

    Max-plus relaxation from p = 0; returns None when some round n+1 still
    improves, i.e. a positive cycle exists.
    """
    n, w = graph.n, graph.weight
    p = [ZERO] * n
    for _ in range(n + 1):
        changed = False
        relaxed = list(p)
        for i in range(n):
            row = w[i]
            best = relaxed[i]
            for j in range(n):
                if j != i and row[j] + p[j] > best:
                    best = row[j] + p[j]
            if best > relaxed[i]:
                relaxed[i] = best
                changed = True
        p = relaxed
        if not changed:
            return p
    return None


def cycle_weight(graph: EnvyGraph, cycle: Sequence[int]) -> Fraction:
    return sum((graph.weight[a][b] for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]])), ZERO)


def find_positive_cycle(graph: EnvyGraph) -> Optional[tuple[list[int], Fraction]]:
    if graph.n < 2:
        return None
    digraph = nx.DiGraph()
    for i in range(graph.n):
        for j in range(graph.n):
            if i != j:
                digraph.add_edge(i, j, weight=-graph.weight[i][j])
    try:
        found = nx.find_negative_cycle(digraph, 0, weight="weight")
    except nx.NetworkXError:
        return None
    cycle = list(found[:-1]) if len(found) > 1 and found[0] == found[-1] else list(found)
    weight = cycle_weight(graph, cycle)
    if weight <= 0:
        logger.warning("Negative-cycle search returned non-positive cycle %s (%s)", cycle, weight)
        return None
    return cycle, weight


def is_envy_freeable(instance: Instance, orientation: Orientation) -> bool:
    return longest_path_payments(build_envy_graph(instance, orientation)) is not None


def min_payments(instance: Instance, orientation: Orientation) -> PaymentVector:
    graph = build_envy_graph(instance, orientation)
    payments = longest_path_payments(graph)
    if payments is None:
        found = find_positive_cycle(graph)
        cycle, weight = found if found else ((), None)
        raise NotEnvyFreeable(f"envy graph has a positive cycle {list(cycle)} of weight {weight}", cycle, weight)
    return PaymentVector(tuple(payments))


def is_ef_with_payments(instance: Instance, orientation: Orientation, payments: PaymentVector) -> bool:
    graph = build_envy_graph(instance, orientation)
    return all(
        graph.weight[i][j] <= payments[i] - payments[j]
        for i in range(instance.n)
        for j in range(instance.n)
        if i != j
    )


def local_efable(instance: Instance, orientation: Orientation, i: int, j: int) -> bool:
    """Swapping the two parts of E_ij between i and j does not raise their joint value."""
    graph = instance.graph
    a_ij = orientation.restricted(graph, i, j)
    a_ji = orientation.restricted(graph, j, i)
    return instance.value(i, a_ij) + instance.value(j, a_ji) >= instance.value(i, a_ji) + instance.value(j, a_ij)


def pair_local_efable(instance: Instance, i: int, j: int, bundle_i, bundle_j) -> bool:
    """``local_efable`` for a candidate split of E_ij that is not committed yet."""
    return instance.value(i, bundle_i) + instance.value(j, bundle_j) >= instance.value(i, bundle_j) + instance.value(j, bundle_i)
