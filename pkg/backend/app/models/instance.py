"""Instances: multigraphs of agents and edge-items plus valuation profiles.

All values are exact ``Fraction``s. A bundle's value for an agent depends only
on the bundle's intersection with the agent's incident edges.
"""

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx

from ..core.errors import InputError, NormalizationError

ZERO = Fraction(0)
ONE = Fraction(1)


def positive_part(d: Fraction) -> Fraction:
    return d if d > 0 else ZERO


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise InputError(f"edge {self.id} is a self-loop on agent {self.u}")

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, agent: int) -> int:
        if agent == self.u:
            return self.v
        if agent == self.v:
            return self.u
        raise InputError(f"agent {agent} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class MultiGraph:
    n_agents: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n_agents < 1:
            raise InputError("a graph needs at least one agent")
        for index, edge in enumerate(self.edges):
            if edge.id != index:
                raise InputError(f"edge ids must be 0..m-1 in order, found {edge.id} at position {index}")
            for end in edge.endpoints:
                if not 0 <= end < self.n_agents:
                    raise InputError(f"edge {edge.id} has endpoint {end} outside [0, {self.n_agents})")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def _incident(self) -> tuple[tuple[int, ...], ...]:
        lists: list[list[int]] = [[] for _ in range(self.n_agents)]
        for edge in self.edges:
            lists[edge.u].append(edge.id)
            lists[edge.v].append(edge.id)
        return tuple(tuple(ids) for ids in lists)

    @cached_property
    def _between(self) -> dict[tuple[int, int], tuple[int, ...]]:
        pairs: dict[tuple[int, int], list[int]] = {}
        for edge in self.edges:
            pairs.setdefault(_pair(edge.u, edge.v), []).append(edge.id)
        return {key: tuple(ids) for key, ids in pairs.items()}

    def incident(self, agent: int) -> tuple[int, ...]:
        self.check_agent(agent)
        return self._incident[agent]

    def between(self, i: int, j: int) -> tuple[int, ...]:
        return self._between.get(_pair(i, j), ())

    def neighbors(self, agent: int) -> tuple[int, ...]:
        return tuple(sorted({self.edges[e].other(agent) for e in self.incident(agent)}))

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        return sorted(self._between)

    def is_simple(self) -> bool:
        return all(len(ids) == 1 for ids in self._between.values())

    def check_agent(self, agent: int) -> None:
        if not isinstance(agent, int) or not 0 <= agent < self.n_agents:
            raise InputError(f"unknown agent {agent}")

    def check_edges(self, bundle: Iterable[int]) -> None:
        for e in bundle:
            if not isinstance(e, int) or not 0 <= e < self.m:
                raise InputError(f"unknown edge {e}")

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.n_agents))
        for edge in self.edges:
            graph.add_edge(edge.u, edge.v, key=edge.id)
        return graph

    @classmethod
    def from_pairs(cls, n_agents: int, pairs: Sequence[tuple[int, int]]) -> "MultiGraph":
        return cls(n_agents, tuple(Edge(index, u, v) for index, (u, v) in enumerate(pairs)))


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class FamilyKind(str, Enum):
    PLAIN_ADDITIVE = "additive"
    ADDITIVE_CAPPED = "additive_capped"
    ALL_OR_NOTHING_DEGREE = "all_or_nothing_degree"
    UNIT_DEMAND = "unit_demand"


@dataclass(frozen=True)
class MonotoneFamily:
    """A closed-form monotone valuation over the agent's incident item values."""

    kind: FamilyKind
    cap: Optional[Fraction] = None
    threshold: Optional[int] = None

    def __post_init__(self):
        if self.kind is FamilyKind.ADDITIVE_CAPPED and (self.cap is None or self.cap < 0):
            raise InputError("additive_capped needs a nonnegative cap")
        if self.kind is FamilyKind.ALL_OR_NOTHING_DEGREE and (self.threshold is None or self.threshold < 1):
            raise InputError("all_or_nothing_degree needs an integer threshold >= 1")

    @classmethod
    def plain(cls) -> "MonotoneFamily":
        return cls(FamilyKind.PLAIN_ADDITIVE)

    @classmethod
    def capped(cls, cap) -> "MonotoneFamily":
        return cls(FamilyKind.ADDITIVE_CAPPED, cap=Fraction(cap))

    @classmethod
    def all_or_nothing(cls, threshold: int) -> "MonotoneFamily":
        return cls(FamilyKind.ALL_OR_NOTHING_DEGREE, threshold=threshold)

    @classmethod
    def unit_demand(cls) -> "MonotoneFamily":
        return cls(FamilyKind.UNIT_DEMAND)

    def evaluate(self, item_values: Sequence[Fraction]) -> Fraction:
        """Value of a bundle given the base values of its incident items."""
        if self.kind is FamilyKind.PLAIN_ADDITIVE:
            return sum(item_values, ZERO)
        if self.kind is FamilyKind.ADDITIVE_CAPPED:
            return min(self.cap, sum(item_values, ZERO))
        if self.kind is FamilyKind.ALL_OR_NOTHING_DEGREE:
            return ONE if len(item_values) >= self.threshold else ZERO
        return max(item_values, default=ZERO)

    def max_marginal(self, incident_values: Sequence[Fraction]) -> Fraction:
        # Analytic per family: the largest v(S + e) - v(S) over S and incident e
        if self.kind is FamilyKind.ALL_OR_NOTHING_DEGREE:
            return ONE if len(incident_values) >= self.threshold else ZERO
        best = max(incident_values, default=ZERO)
        if self.kind is FamilyKind.ADDITIVE_CAPPED:
            return min(self.cap, best)
        return best


@dataclass(frozen=True)
class ValuationProfile:
    """Base values per (edge id, endpoint); ``families`` is None for Additive profiles."""

    values: Mapping[tuple[int, int], Fraction]
    families: Optional[tuple[MonotoneFamily, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "values", {key: Fraction(val) for key, val in self.values.items()})
        for key, val in self.values.items():
            if val < 0:
                raise InputError(f"negative value {val} for edge {key[0]}, agent {key[1]}")
        if self.families is not None:
            object.__setattr__(self, "families", tuple(self.families))

    @property
    def is_additive(self) -> bool:
        return self.families is None or all(f.kind is FamilyKind.PLAIN_ADDITIVE for f in self.families)

    @property
    def variant(self) -> str:
        return "additive" if self.families is None else "monotone"

    def family(self, agent: int) -> MonotoneFamily:
        if self.families is None:
            return MonotoneFamily.plain()
        return self.families[agent]

    def item_value(self, agent: int, edge_id: int) -> Fraction:
        return self.values.get((edge_id, agent), ZERO)

    def is_binary(self) -> bool:
        return self.is_additive and all(val in (ZERO, ONE) for val in self.values.values())


@dataclass(frozen=True)
class Instance:
    graph: MultiGraph
    valuations: ValuationProfile
    label: Optional[str] = None

    def __post_init__(self):
        for (edge_id, agent), val in self.valuations.values.items():
            if not 0 <= edge_id < self.graph.m:
                raise InputError(f"value given for unknown edge {edge_id}")
            if agent not in self.graph.edges[edge_id].endpoints and val != 0:
                raise InputError(f"agent {agent} is not an endpoint of edge {edge_id}")
        if self.valuations.families is not None and len(self.valuations.families) != self.graph.n_agents:
            raise InputError("one valuation family per agent is required")

    @property
    def n(self) -> int:
        return self.graph.n_agents

    @property
    def m(self) -> int:
        return self.graph.m

    def item_value(self, agent: int, edge_id: int) -> Fraction:
        return self.valuations.item_value(agent, edge_id)

    def value(self, agent: int, bundle: Iterable[int]) -> Fraction:
        self.graph.check_agent(agent)
        bundle = list(bundle)
        self.graph.check_edges(bundle)
        incident = [e for e in bundle if agent in self.graph.edges[e].endpoints]
        family = self.valuations.family(agent)
        return family.evaluate([self.valuations.item_value(agent, e) for e in incident])


def value(instance: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    return instance.value(agent, bundle)


@dataclass(frozen=True)
class NormalizationReport:
    max_marginal: Fraction
    is_unit: bool


def check_normalization(instance: Instance) -> dict[int, NormalizationReport]:
    reports = {}
    for agent in range(instance.n):
        incident = [instance.item_value(agent, e) for e in instance.graph.incident(agent)]
        top = instance.valuations.family(agent).max_marginal(incident)
        reports[agent] = NormalizationReport(max_marginal=top, is_unit=top == ONE)
    return reports


def max_marginal_at_most_one(instance: Instance) -> bool:
    return all(report.max_marginal <= ONE for report in check_normalization(instance).values())


def is_unit_normalized(instance: Instance) -> bool:
    """Additive profile whose every agent has maximum incident value exactly 1."""
    return instance.valuations.is_additive and all(
        report.is_unit for report in check_normalization(instance).values()
    )


def normalize_additive(instance: Instance) -> Instance:
    """Divide each agent's values by its maximum incident value.

    Payments on the result are in per-agent normalized currency.
    """
    if not instance.valuations.is_additive:
        raise NormalizationError("normalize_additive needs an additive profile")
    scale = {}
    for agent in range(instance.n):
        top = max((instance.item_value(agent, e) for e in instance.graph.incident(agent)), default=ZERO)
        if top == 0:
            raise NormalizationError(f"agent {agent} values every incident edge at 0", reason="degenerate_agent")
        scale[agent] = top
    values = {(e, agent): val / scale[agent] for (e, agent), val in instance.valuations.values.items()}
    return replace(instance, valuations=ValuationProfile(values, instance.valuations.families))


def additive_instance(
    n_agents: int,
    edges: Sequence[tuple[int, int, object, object]],
    label: Optional[str] = None,
) -> Instance:
    """Build an additive instance from ``(u, v, value_to_u, value_to_v)`` rows."""
    graph = MultiGraph.from_pairs(n_agents, [(u, v) for u, v, _, _ in edges])
    values = {}
    for index, (u, v, vu, vv) in enumerate(edges):
        values[(index, u)] = Fraction(vu)
        values[(index, v)] = Fraction(vv)
    return Instance(graph, ValuationProfile(values), label=label)


def monotone_instance(
    n_agents: int,
    edges: Sequence[tuple[int, int, object, object]],
    families: Sequence[MonotoneFamily],
    label: Optional[str] = None,
) -> Instance:
    base = additive_instance(n_agents, edges)
    return Instance(base.graph, ValuationProfile(base.valuations.values, tuple(families)), label=label)
