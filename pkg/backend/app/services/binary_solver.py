"""Minimum-subsidy EF orientations for binary additive valuations.

Edges valued 1 by both endpoints are *critical*. Edges valued 1 by exactly one
endpoint always go to that endpoint (nobody else wants them) and act as
anchors. Components are taken over the critical edges; a component needs a
subsidy of 1 exactly when it has at least two vertices and none of the
properties P1-P4 holds.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import networkx as nx

from ..core.config import settings
from ..core.errors import InputError, InvariantViolation, PreconditionError
from ..models.instance import ONE, ZERO, Instance
from ..models.solution import Orientation, PaymentVector, Solution
from .envy_service import is_ef_with_payments

logger = logging.getLogger(__name__)


class Property(str, Enum):
    P1 = "P1"  # a vertex holds an edge only it values
    P2 = "P2"  # cycle of length >= 3 in the critical skeleton
    P3 = "P3"  # adjacent pair with an even (>= 2) number of critical edges
    P4 = "P4"  # vertex with two neighbours each sharing >= 2 critical edges


@dataclass(frozen=True)
class BinaryComponent:
    id: int
    vertices: tuple[int, ...]
    critical: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    anchors: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def is_singleton(self) -> bool:
        return len(self.vertices) == 1


@dataclass(frozen=True)
class ComponentClass:
    component_id: int
    satisfied: frozenset[Property]
    first: Optional[Property] = None
    witness: tuple = ()

    @property
    def property_free(self) -> bool:
        return not self.satisfied


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _ceil_half(x: int) -> int:
    return -(-x // 2)


def decompose(instance: Instance) -> tuple[list[BinaryComponent], list[int]]:
    """Split the instance into critical-edge components; returns them plus the 0-0 edges."""
    if not instance.valuations.is_binary():
        raise InputError("binary solver needs additive values in {0, 1}")
    critical: dict[tuple[int, int], list[int]] = {}
    anchors: dict[int, list[int]] = {}
    zero_edges = []
    for edge in instance.graph.edges:
        vu, vv = instance.item_value(edge.u, edge.id), instance.item_value(edge.v, edge.id)
        if vu == ONE and vv == ONE:
            critical.setdefault(_pair(edge.u, edge.v), []).append(edge.id)
        elif vu == ONE or vv == ONE:
            anchors.setdefault(edge.u if vu == ONE else edge.v, []).append(edge.id)
        else:
            zero_edges.append(edge.id)

    skeleton = nx.Graph()
    skeleton.add_nodes_from(range(instance.n))
    skeleton.add_edges_from(sorted(critical))
    components = []
    for index, nodes in enumerate(sorted((sorted(c) for c in nx.connected_components(skeleton)), key=lambda c: c[0])):
        members = set(nodes)
        components.append(BinaryComponent(
            id=index,
            vertices=tuple(nodes),
            critical={pair: tuple(ids) for pair, ids in sorted(critical.items()) if pair[0] in members},
            anchors={v: tuple(anchors[v]) for v in nodes if v in anchors},
        ))
    return components, zero_edges


def _canonical_cycle(cycle: list[int]) -> tuple[int, ...]:
    start = cycle.index(min(cycle))
    rotated = cycle[start:] + cycle[:start]
    if rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[1:][::-1]
    return tuple(rotated)


def classify_component(component: BinaryComponent) -> ComponentClass:
    found: dict[Property, tuple] = {}

    holders = sorted(component.anchors)
    if holders:
        found[Property.P1] = (holders[0], component.anchors[holders[0]])

    skeleton = nx.Graph()
    skeleton.add_nodes_from(component.vertices)
    skeleton.add_edges_from(sorted(component.critical))
    try:
        cycle_edges = nx.find_cycle(skeleton, source=component.vertices[0])
        found[Property.P2] = _canonical_cycle([u for u, _ in cycle_edges])
    except nx.NetworkXNoCycle:
        pass

    for pair, ids in sorted(component.critical.items()):
        if len(ids) >= 2 and len(ids) % 2 == 0:
            found[Property.P3] = pair
            break

    for i in component.vertices:
        heavy = sorted(
            (j for j in component.vertices if j != i and len(component.critical.get(_pair(i, j), ())) >= 2)
        )
        if len(heavy) >= 2:
            found[Property.P4] = (i, heavy[0], heavy[1])
            break

    first = next((prop for prop in Property if prop in found), None)
    return ComponentClass(
        component_id=component.id,
        satisfied=frozenset(found),
        first=first,
        witness=found.get(first, ()) if first else (),
    )


def orient_component(
    component: BinaryComponent,
    cls: ComponentClass,
    subsidized_agent: Optional[int] = None,
) -> tuple[dict[int, int], dict[int, int]]:
    """Orient every edge of the component; returns ``(edge -> owner, labels)``.

    A label is the value an agent currently holds plus its subsidy. The loop
    repeatedly removes the lowest-id labelled agent ``i`` and splits each
    remaining E_ij: ``i`` takes just enough critical edges that it does not
    envy ``j``, and ``j`` keeps the rest (which labels it).
    """
    if cls.property_free and subsidized_agent is None and not component.is_singleton:
        raise PreconditionError("a property-free component needs a subsidized agent")

    owner: dict[int, int] = {}
    held = {v: 0 for v in component.vertices}
    bonus = {subsidized_agent: 1} if subsidized_agent is not None else {}
    remaining = {pair: list(ids) for pair, ids in component.critical.items()}

    def give(agent: int, edges) -> None:
        for e in edges:
            owner[e] = agent
            held[agent] += 1

    for v, edges in component.anchors.items():
        give(v, edges)

    if cls.first is Property.P2:
        cycle = cls.witness
        for t, v in enumerate(cycle):
            pair = _pair(v, cycle[(t + 1) % len(cycle)])
            give(v, [remaining[pair].pop(0)])
    elif cls.first is Property.P3:
        i, j = cls.witness
        edges = remaining.pop((i, j))
        give(i, edges[: len(edges) // 2])
        give(j, edges[len(edges) // 2:])
    elif cls.first is Property.P4:
        i, j, k = cls.witness
        for other in (j, k):
            edges = remaining[_pair(i, other)]
            take = len(edges) // 2
            give(i, edges[:take])
            remaining[_pair(i, other)] = edges[take:]

    def label(v: int) -> int:
        return held[v] + bonus.get(v, 0)

    alive = set(component.vertices)
    while alive:
        ready = [v for v in sorted(alive) if label(v) >= 1]
        if not ready:
            if all(not edges for edges in remaining.values()):
                break
            raise InvariantViolation(f"component {component.id}: no labelled agent among {sorted(alive)}")
        i = ready[0]
        for j in sorted(alive - {i}):
            pair = _pair(i, j)
            edges = remaining.get(pair)
            if not edges:
                continue
            r = len(edges)
            b = sum(1 for e in component.critical[pair] if owner.get(e) == j)
            y = min(r, max(0, _ceil_half(b + r - label(i))))
            give(i, edges[:y])
            give(j, edges[y:])
            remaining[pair] = []
            logger.debug("component %s: agent %s keeps %s of %s edges shared with %s", component.id, i, y, r, j)
        alive.remove(i)

    return owner, {v: label(v) for v in component.vertices}


def solve_binary(instance: Instance) -> Solution:
    components, zero_edges = decompose(instance)
    classes = [classify_component(c) for c in components]

    bad = [c for c, cls in zip(components, classes) if cls.property_free and not c.is_singleton]
    null_agents = [c.vertices[0] for c, cls in zip(components, classes) if cls.property_free and c.is_singleton]

    payments = [ZERO] * instance.n
    owner: dict[int, int] = {}
    report = []
    for component, cls in zip(components, classes):
        subsidized = None
        if cls.property_free and not component.is_singleton:
            subsidized = component.vertices[0]
            payments[subsidized] = ONE
        elif cls.property_free and bad:
            # A null agent envies any paid agent unless it is paid as well
            payments[component.vertices[0]] = ONE
        allocated, labels = orient_component(component, cls, subsidized)
        owner.update(allocated)
        if settings.CHECK_INVARIANTS and not cls.property_free:
            poor = [v for v, lab in labels.items() if lab < 1]
            if poor:
                raise InvariantViolation(f"component {component.id}: agents {poor} end with value 0")
        report.append({
            "id": component.id,
            "vertices": list(component.vertices),
            "satisfied": sorted(p.value for p in cls.satisfied),
            "first": cls.first.value if cls.first else None,
            "subsidized": subsidized,
        })
        logger.debug("component %s %s satisfies %s", component.id, component.vertices, report[-1]["satisfied"])

    for e in zero_edges:
        edge = instance.graph.edges[e]
        owner[e] = min(edge.u, edge.v)

    orientation = Orientation(tuple(owner[e] for e in range(instance.m)))
    vector = PaymentVector(tuple(payments))
    if settings.CHECK_INVARIANTS and not is_ef_with_payments(instance, orientation, vector):
        raise InvariantViolation("binary orientation is not envy-free with its payments")

    logger.info("binary solver: %s bad components, %s null agents, subsidy %s", len(bad), len(null_agents), vector.total)
    return Solution(
        orientation=orientation,
        payments=vector,
        algorithm="binary",
        bound=vector.total,
        diagnostics={"components": report, "null_agents": null_agents},
    )
