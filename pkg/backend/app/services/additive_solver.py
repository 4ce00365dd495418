"""EF orientations with total subsidy at most n/2 for additive valuations.

Every agent first claims one incident edge it values at exactly 1. Arcs point
from the other endpoint to the claimant, so each vertex has in-degree one and
each weakly connected component carries exactly one directed cycle. Phase 1
allocates the edges along arcs (Sub1/Sub2 on the out-trees hanging off a
2-cycle); Phase 2 allocates every remaining pair and lowers payments where an
agent is overpaid.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import networkx as nx

from ..core.config import settings
from ..core.errors import InvariantViolation, NormalizationError, PreconditionError
from ..models.instance import ONE, ZERO, Instance, is_unit_normalized, positive_part
from ..models.solution import Orientation, PaymentVector, Solution
from .envy_service import is_ef_with_payments, local_efable, pair_local_efable
from .subroutines import max_utility, round_robin

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReserveComponent:
    id: int
    vertices: tuple[int, ...]
    cycle: tuple[int, ...]  # arcs cycle[t] -> cycle[t + 1]
    arcs: tuple[tuple[int, int], ...]
    children: dict[int, tuple[int, ...]]  # out-neighbours, cycle successor excluded

    @property
    def has_two_cycle(self) -> bool:
        return len(self.cycle) == 2

    def bfs_order(self, root: int) -> list[int]:
        order, queue = [], deque([root])
        while queue:
            agent = queue.popleft()
            order.append(agent)
            queue.extend(self.children[agent])
        return order


@dataclass(frozen=True)
class ReserveGraph:
    claim: tuple[int, ...]
    parent: tuple[int, ...]  # the other endpoint of each agent's claimed edge
    arcs: tuple[tuple[int, int], ...]
    components: tuple[ReserveComponent, ...]


def build_reserve_graph(instance: Instance) -> ReserveGraph:
    claim, parent = [], []
    for agent in range(instance.n):
        units = [e for e in instance.graph.incident(agent) if instance.item_value(agent, e) == ONE]
        if not units:
            raise PreconditionError(f"agent {agent} has no incident edge valued exactly 1", reason="no_unit_edge")
        claim.append(units[0])
        parent.append(instance.graph.edges[units[0]].other(agent))

    arcs = tuple(sorted((parent[i], i) for i in range(instance.n)))
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(instance.n))
    digraph.add_edges_from(arcs)

    components = []
    for index, nodes in enumerate(sorted((sorted(c) for c in nx.weakly_connected_components(digraph)), key=lambda c: c[0])):
        seen, walk, agent = set(), [], nodes[0]
        while agent not in seen:
            seen.add(agent)
            walk.append(agent)
            agent = parent[agent]
        backwards = walk[walk.index(agent):]
        cycle = backwards[::-1]
        start = cycle.index(min(cycle))
        cycle = cycle[start:] + cycle[:start]
        successor = {cycle[t]: cycle[(t + 1) % len(cycle)] for t in range(len(cycle))}
        children = {
            v: tuple(sorted(c for c in digraph.successors(v) if c != successor.get(v)))
            for v in nodes
        }
        members = set(nodes)
        components.append(ReserveComponent(
            id=index,
            vertices=tuple(nodes),
            cycle=tuple(cycle),
            arcs=tuple(arc for arc in arcs if arc[0] in members),
            children=children,
        ))
    return ReserveGraph(tuple(claim), tuple(parent), arcs, tuple(components))


@dataclass
class Sub2Call:
    agent: int
    parent: int
    k: int
    w: Fraction
    t: Fraction
    R: list[int] = field(default_factory=list)
    Q1: list[int] = field(default_factory=list)
    Q1_prime: list[int] = field(default_factory=list)
    Q2: list[int] = field(default_factory=list)
    Q3: list[int] = field(default_factory=list)
    Q4: list[int] = field(default_factory=list)
    Q5: list[int] = field(default_factory=list)
    own_parent: Fraction = ZERO


@dataclass
class Sub2State:
    """Mutable allocation state shared by Sub1, Sub2 and the two phases."""

    instance: Instance
    reserve: ReserveGraph
    owner: dict[int, int] = field(default_factory=dict)
    w: dict[int, Fraction] = field(default_factory=dict)
    t: dict[int, Fraction] = field(default_factory=dict)
    calls: list[Sub2Call] = field(default_factory=list)
    allocated: set[tuple[int, int]] = field(default_factory=set)

    def commit(self, i: int, j: int, bundle_i: Iterable[int], bundle_j: Iterable[int]) -> None:
        for e in bundle_i:
            self.owner[e] = i
        for e in bundle_j:
            self.owner[e] = j
        self.allocated.add((min(i, j), max(i, j)))

    def part(self, holder: int, other: int) -> list[int]:
        """Committed part of E_{holder,other} owned by ``holder``."""
        return [e for e in self.instance.graph.between(holder, other) if self.owner.get(e) == holder]

    def holdings(self, agent: int) -> list[int]:
        return [e for e, o in self.owner.items() if o == agent]

    def value(self, agent: int, bundle: Iterable[int]) -> Fraction:
        return self.instance.value(agent, bundle)

    def utility(self, agent: int) -> Fraction:
        return self.value(agent, self.holdings(agent))

    def swap(self, i: int, j: int) -> None:
        mine, theirs = self.part(i, j), self.part(j, i)
        self.commit(i, j, theirs, mine)

    def pay(self, agent: int) -> Fraction:
        return self.t.get(agent, ZERO)


def sub1(instance: Instance, i: int, component: ReserveComponent, state: Sub2State) -> None:
    for j in component.children[i]:
        bundle_j, bundle_i = round_robin(instance, j, i, instance.graph.between(i, j))
        state.commit(i, j, bundle_i, bundle_j)


def sub2(instance: Instance, i: int, component: ReserveComponent, state: Sub2State) -> Sub2Call:
    graph = instance.graph
    s = state.reserve.parent[i]
    children = component.children[i]
    if i in state.w or i in state.t:
        raise InvariantViolation(f"Sub2 visited agent {i} twice")

    own_parent = state.value(i, state.part(i, s))
    parent_part = state.part(s, i)
    w_i = positive_part(state.pay(s) + state.value(i, parent_part) - own_parent)
    state.w[i] = w_i

    # Virtual round-robin split per child: (i's part, j's part)
    virtual = {}
    for j in children:
        t_j, t_i = round_robin(instance, j, i, graph.between(i, j), prefer_reserve=state.reserve.claim[j])
        virtual[j] = (t_i, t_j)

    k, best = s, state.value(i, parent_part) + state.pay(s)
    for j in children:
        score = state.value(i, virtual[j][1]) + state.pay(j)
        if score > best:
            k, best = j, score

    call = Sub2Call(agent=i, parent=s, k=k, w=w_i, t=ZERO, own_parent=own_parent)
    call.R = [j for j in children if state.value(i, graph.between(i, j)) < best]
    split = {}
    for j in call.R:
        s_j, s_i = max_utility(instance, j, i, graph.between(i, j))
        split[j] = (s_i, s_j)

    def envy_of(j: int) -> Fraction:
        s_i, s_j = split[j]
        return state.value(j, s_i) - state.value(j, s_j)

    for j in call.R:
        if ZERO <= envy_of(j) <= w_i:
            if not call.Q1:
                call.Q1.append(j)
                state.commit(i, j, *split[j])
            else:
                call.Q1_prime.append(j)
                state.commit(i, j, *virtual[j])
    for j in call.R:
        if envy_of(j) > w_i:
            call.Q2.append(j)
            state.commit(i, j, *virtual[j])
    for j in call.R:
        if j not in call.Q1 and j not in call.Q1_prime and j not in call.Q2:
            call.Q3.append(j)
            state.commit(i, j, *split[j])
    outside = [j for j in children if j not in call.R]
    for j in outside:
        state.commit(i, j, *virtual[j])

    total_i = state.utility(i)
    violators = [
        j for j in outside
        if state.value(i, state.part(j, i)) + state.value(j, state.part(i, j))
        > total_i + state.value(j, state.part(j, i))
    ]
    if violators:
        q = max(violators, key=lambda j: (state.value(i, state.part(j, i)), -j))
        state.swap(i, q)
        call.Q4.append(q)
    call.Q5 = [j for j in outside if j not in call.Q4]

    call.t = positive_part(state.value(i, state.part(k, i)) + state.pay(k) - state.utility(i))
    state.t[i] = call.t
    state.calls.append(call)
    logger.debug(
        "Sub2(%s): s=%s k=%s w=%s t=%s R=%s Q1=%s Q1'=%s Q2=%s Q3=%s Q4=%s Q5=%s",
        i, s, k, w_i, call.t, call.R, call.Q1, call.Q1_prime, call.Q2, call.Q3, call.Q4, call.Q5,
    )
    return call


def _check(condition: bool, message: str) -> None:
    if settings.CHECK_INVARIANTS and not condition:
        raise InvariantViolation(message)


def _run_component(instance: Instance, component: ReserveComponent, state: Sub2State) -> dict:
    graph = instance.graph
    if not component.has_two_cycle:
        for tail, head in component.arcs:
            bundle_head, bundle_tail = round_robin(instance, head, tail, graph.between(tail, head))
            state.commit(tail, head, bundle_tail, bundle_head)
        return {"id": component.id, "cycle": list(component.cycle), "mode": "round-robin"}

    f, g = component.cycle
    bundle_g, bundle_f = round_robin(instance, g, f, graph.between(f, g))
    if not pair_local_efable(instance, f, g, bundle_f, bundle_g):
        bundle_f, bundle_g = bundle_g, bundle_f
    state.commit(f, g, bundle_f, bundle_g)

    f_envies = state.value(f, bundle_g) > state.value(f, bundle_f)
    g_envies = state.value(g, bundle_f) > state.value(g, bundle_g)
    if not f_envies and not g_envies:
        for root in (f, g):
            for agent in component.bfs_order(root):
                sub1(instance, agent, component, state)
        return {"id": component.id, "cycle": [f, g], "mode": "sub1"}

    if g_envies:
        f, g = g, f
    state.t.setdefault(g, ZERO)
    for agent in component.bfs_order(f):
        sub2(instance, agent, component, state)
    for agent in component.bfs_order(g):
        sub1(instance, agent, component, state)
    return {"id": component.id, "cycle": [f, g], "mode": "sub2", "envious": f}


def _check_phase_one(instance: Instance, component: ReserveComponent, state: Sub2State) -> None:
    if not settings.CHECK_INVARIANTS:
        return
    for call in (c for c in state.calls if c.agent in component.vertices):
        children_w = sum((state.w.get(j, ZERO) for j in component.children[call.agent]), ZERO)
        _check(call.t + children_w <= call.w, f"agent {call.agent}: t + sum of child w exceeds w")
        _check(call.t <= call.w, f"agent {call.agent}: t exceeds w")
        _check(call.own_parent + call.w >= ONE, f"agent {call.agent}: own parent part plus w is below 1")
    total_t = sum((state.pay(v) for v in component.vertices), ZERO)
    _check(total_t <= ONE, f"component {component.id}: sum of t is {total_t} > 1")
    for tail, head in component.arcs:
        for x, y in ((tail, head), (head, tail)):
            _check(
                state.utility(x) + state.pay(x) >= state.value(x, state.holdings(y)) + state.pay(y),
                f"agent {x} envies reserve neighbour {y} after phase 1",
            )


def solve_additive_multigraph(instance: Instance) -> Solution:
    if not is_unit_normalized(instance):
        raise NormalizationError(
            "additive multigraph solver needs an additive profile where every agent's maximum value is exactly 1"
        )
    reserve = build_reserve_graph(instance)
    state = Sub2State(instance=instance, reserve=reserve)

    report = []
    for component in reserve.components:
        report.append(_run_component(instance, component, state))
        _check_phase_one(instance, component, state)

    payments = [state.pay(agent) for agent in range(instance.n)]
    adjustments = []
    settled = []
    for i, j in instance.graph.adjacent_pairs():
        if (i, j) in state.allocated:
            continue
        settled.append((i, j))
        before = {x: state.utility(x) + payments[x] for x in (i, j)}
        bundle_i, bundle_j = round_robin(instance, i, j, instance.graph.between(i, j))
        if not pair_local_efable(instance, i, j, bundle_i, bundle_j):
            bundle_i, bundle_j = bundle_j, bundle_i
        state.commit(i, j, bundle_i, bundle_j)

        for x, y in ((i, j), (j, i)):
            y_content = state.value(y, state.part(y, x)) >= state.value(y, state.part(x, y))
            if not y_content:
                continue
            seen = state.value(x, state.part(y, x))
            if seen + payments[y] > state.utility(x) + payments[x]:
                lowered = positive_part(state.utility(x) + payments[x] - seen)
                adjustments.append({"pair": [i, j], "agent": y, "from": payments[y], "to": lowered})
                logger.debug("phase 2: agent %s payment %s -> %s", y, payments[y], lowered)
                payments[y] = lowered
                break
        for x in (i, j):
            _check(state.utility(x) + payments[x] >= before[x], f"agent {x} lost utility in phase 2 on pair {(i, j)}")

    orientation = Orientation(tuple(state.owner[e] for e in range(instance.m)))
    vector = PaymentVector(tuple(payments))
    if settings.CHECK_INVARIANTS:
        # Phase 1 pairs are split by claim budgets and need not be locally envy-freeable
        for i, j in settled:
            _check(local_efable(instance, orientation, i, j), f"pair {(i, j)} is not locally envy-freeable")
        _check(is_ef_with_payments(instance, orientation, vector), "final allocation is not envy-free with payments")

    logger.info("additive multigraph solver: subsidy %s for %s agents", vector.total, instance.n)
    return Solution(
        orientation=orientation,
        payments=vector,
        algorithm="additive-multi",
        bound=Fraction(instance.n, 2),
        diagnostics={
            "claims": list(reserve.claim),
            "components": report,
            "w": {a: state.w[a] for a in sorted(state.w)},
            "t": {a: state.pay(a) for a in range(instance.n)},
            "sub2": [_call_summary(c) for c in state.calls],
            "phase2_pairs": [list(pair) for pair in settled],
            "phase2_adjustments": adjustments,
        },
    )


def _call_summary(call: Sub2Call) -> dict:
    return {
        "agent": call.agent,
        "parent": call.parent,
        "k": call.k,
        "w": call.w,
        "t": call.t,
        "R": call.R,
        "Q1": call.Q1,
        "Q1_prime": call.Q1_prime,
        "Q2": call.Q2,
        "Q3": call.Q3,
        "Q4": call.Q4,
        "Q5": call.Q5,
    }
