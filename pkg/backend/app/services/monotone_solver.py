"""EF orientations with total subsidy at most n-1 for monotone valuations."""

import logging
from dataclasses import dataclass
from fractions import Fraction

from ..core.config import settings
from ..core.errors import InvariantViolation, NormalizationError
from ..models.instance import ONE, ZERO, Instance, max_marginal_at_most_one
from ..models.solution import Orientation, Solution
from .envy_service import min_payments
from .subroutines import envy_cycle_two

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairTemp:
    i: int
    j: int
    bundle_i: tuple[int, ...]
    bundle_j: tuple[int, ...]
    i_envies: bool
    j_envies: bool

    def bundle(self, agent: int) -> tuple[int, ...]:
        return self.bundle_i if agent == self.i else self.bundle_j


PairwiseTemp = dict[tuple[int, int], PairTemp]


def build_pairwise_temp(instance: Instance) -> PairwiseTemp:
    temp = {}
    for i, j in instance.graph.adjacent_pairs():
        bundle_i, bundle_j = envy_cycle_two(instance, i, j, instance.graph.between(i, j))
        temp[(i, j)] = PairTemp(
            i=i,
            j=j,
            bundle_i=bundle_i,
            bundle_j=bundle_j,
            i_envies=instance.value(i, bundle_j) > instance.value(i, bundle_i),
            j_envies=instance.value(j, bundle_i) > instance.value(j, bundle_j),
        )
    return temp


def thresholds(instance: Instance, temp: PairwiseTemp) -> list[Fraction]:
    """b_i: the best over neighbours of i's value for the worse of the two temp bundles."""
    b = [ZERO] * instance.n
    for pair in temp.values():
        for agent in (pair.i, pair.j):
            worse = min(instance.value(agent, pair.bundle_i), instance.value(agent, pair.bundle_j))
            b[agent] = max(b[agent], worse)
    return b


def solve_monotone_multigraph(instance: Instance) -> Solution:
    if not max_marginal_at_most_one(instance):
        raise NormalizationError("every agent's maximum marginal value must be at most 1")

    temp = build_pairwise_temp(instance)
    b = thresholds(instance, temp)
    owner: dict[int, int] = {}
    decisions = []
    for (i, j), pair in temp.items():
        if not pair.i_envies and not pair.j_envies:
            keep = {i: pair.bundle_i, j: pair.bundle_j}
        else:
            # Both agents weakly prefer the envied bundle T
            envied = j if pair.i_envies else i
            contested, rest = pair.bundle(envied), pair.bundle(i if envied == j else j)
            score_i = instance.value(i, contested) - b[i]
            score_j = instance.value(j, contested) - b[j]
            winner = i if score_i >= score_j else j
            loser = j if winner == i else i
            keep = {winner: contested, loser: rest}
            decisions.append({"pair": [i, j], "winner": winner, "score_i": score_i, "score_j": score_j})
        for agent, bundle in keep.items():
            for e in bundle:
                owner[e] = agent

    orientation = Orientation(tuple(owner[e] for e in range(instance.m)))
    payments = min_payments(instance, orientation)

    if settings.CHECK_INVARIANTS:
        bundles = orientation.bundles(instance.n)
        for agent in range(instance.n):
            if payments[agent] > ONE:
                raise InvariantViolation(f"agent {agent} is paid {payments[agent]} > 1")
            if instance.value(agent, bundles[agent]) < b[agent]:
                raise InvariantViolation(f"agent {agent} ends below its threshold {b[agent]}")

    logger.info("monotone multigraph solver: subsidy %s for %s agents", payments.total, instance.n)
    return Solution(
        orientation=orientation,
        payments=payments,
        algorithm="monotone-multi",
        bound=Fraction(instance.n - 1),
        diagnostics={"b": b, "contested": decisions},
    )
