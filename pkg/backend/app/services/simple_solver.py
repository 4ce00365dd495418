"""EF orientations with total subsidy at most n-2 on simple graphs.

The bound needs an agent j* outside some maximizing pair whose whole
neighbourhood is worth at least t, the largest singleton value. It holds
whenever every agent values its neighbourhood at t or more, e.g. when every
agent has an incident edge worth 1. Instances without such an agent are
refused with ``PreconditionError``; isolated or zero-valued agents can push
the optimum above n-2.
"""

import logging
from fractions import Fraction
from typing import NamedTuple, Optional

from ..core.config import settings
from ..core.errors import InputError, InvariantViolation, NormalizationError, PreconditionError
from ..models.instance import ZERO, Instance, max_marginal_at_most_one, positive_part
from ..models.solution import Orientation, PaymentVector, Solution
from .envy_service import is_ef_with_payments
from .monotone_solver import solve_monotone_multigraph

logger = logging.getLogger(__name__)


class Anchor(NamedTuple):
    t: Fraction
    top_pair: Optional[tuple[int, int]]
    j_star: int


def _singleton(instance: Instance, agent: int, edge_id: int) -> Fraction:
    return instance.value(agent, [edge_id])


def find_anchor(instance: Instance) -> Optional[Anchor]:
    """t, a maximizing ordered pair and an unpaid j* outside it; None when no pair admits one."""
    graph = instance.graph
    singles = {
        (i, graph.edges[e].other(i)): _singleton(instance, i, e) for i in range(instance.n) for e in graph.incident(i)
    }
    t = max(singles.values(), default=ZERO)
    # j* owns its whole neighbourhood and is paid nothing, so it must not envy a payment <= t
    rich = [a for a in range(instance.n) if instance.value(a, graph.incident(a)) >= t]
    if not singles:
        return Anchor(t, None, rich[0]) if rich else None
    for pair in sorted(p for p, single in singles.items() if single == t):
        for a in rich:
            if a not in pair:
                return Anchor(t, pair, a)
    return None


def has_anchor(instance: Instance) -> bool:
    return instance.n < 3 or find_anchor(instance) is not None


def solve_simple_monotone(instance: Instance) -> Solution:
    graph = instance.graph
    if not graph.is_simple():
        raise InputError("simple monotone solver does not accept parallel edges")
    if not max_marginal_at_most_one(instance):
        raise NormalizationError("every agent's maximum marginal value must be at most 1")
    if instance.n < 3:
        logger.info("simple monotone solver: %s agents, falling back to the monotone multigraph solver", instance.n)
        return solve_monotone_multigraph(instance)

    anchor = find_anchor(instance)
    if anchor is None:
        raise PreconditionError(
            "no agent outside a maximizing pair values its neighbourhood at the top singleton value",
            reason="no_unpaid_agent",
        )
    t, top_pair, j_star = anchor

    owner: dict[int, int] = {e: j_star for e in graph.incident(j_star)}
    for edge in graph.edges:
        if edge.id in owner:
            continue
        lo, hi = sorted(edge.endpoints)
        owner[edge.id] = hi if _singleton(instance, hi, edge.id) > _singleton(instance, lo, edge.id) else lo

    orientation = Orientation(tuple(owner[e] for e in range(instance.m)))
    bundles = orientation.bundles(instance.n)
    payments = PaymentVector(tuple(positive_part(t - instance.value(a, bundles[a])) for a in range(instance.n)))

    if settings.CHECK_INVARIANTS:
        zeros = sum(1 for a in range(instance.n) if payments[a] == 0)
        if zeros < 2:
            raise InvariantViolation(f"only {zeros} agents are unpaid")
        if not is_ef_with_payments(instance, orientation, payments):
            raise InvariantViolation("simple orientation is not envy-free with its payments")

    logger.info("simple monotone solver: t=%s, j*=%s, subsidy %s", t, j_star, payments.total)
    return Solution(
        orientation=orientation,
        payments=payments,
        algorithm="simple-monotone",
        bound=Fraction(instance.n - 2),
        diagnostics={"t": t, "top_pair": list(top_pair) if top_pair else None, "j_star": j_star},
    )
