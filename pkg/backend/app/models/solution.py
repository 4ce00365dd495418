from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Sequence

from ..core.errors import InputError
from .instance import ZERO, MultiGraph


@dataclass(frozen=True)
class Orientation:
    """``owner[e]`` is the endpoint of edge ``e`` that receives it."""

    owner: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(int(o) for o in self.owner))

    def validate(self, graph: MultiGraph) -> None:
        if len(self.owner) != graph.m:
            raise InputError(f"orientation covers {len(self.owner)} edges, graph has {graph.m}")
        for edge in graph.edges:
            if self.owner[edge.id] not in edge.endpoints:
                raise InputError(f"edge {edge.id} given to non-endpoint agent {self.owner[edge.id]}")

    def bundle(self, agent: int) -> frozenset[int]:
        return frozenset(e for e, o in enumerate(self.owner) if o == agent)

    def bundles(self, n_agents: int) -> list[frozenset[int]]:
        held: list[set[int]] = [set() for _ in range(n_agents)]
        for e, o in enumerate(self.owner):
            held[o].add(e)
        return [frozenset(b) for b in held]

    def restricted(self, graph: MultiGraph, i: int, j: int) -> frozenset[int]:
        """A_i^j: the part of E_ij that agent ``i`` owns."""
        return frozenset(e for e in graph.between(i, j) if self.owner[e] == i)

    @classmethod
    def from_bundles(cls, m: int, bundles: Mapping[int, Iterable[int]]) -> "Orientation":
        owner: list[Optional[int]] = [None] * m
        for agent, items in bundles.items():
            for e in items:
                if owner[e] is not None:
                    raise InputError(f"edge {e} assigned twice")
                owner[e] = agent
        missing = [e for e, o in enumerate(owner) if o is None]
        if missing:
            raise InputError(f"edges {missing} are unassigned")
        return cls(tuple(owner))


@dataclass(frozen=True)
class PaymentVector:
    amounts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "amounts", tuple(Fraction(a) for a in self.amounts))
        for agent, amount in enumerate(self.amounts):
            if amount < 0:
                raise InputError(f"payment to agent {agent} is negative ({amount})")

    def __getitem__(self, agent: int) -> Fraction:
        return self.amounts[agent]

    def __len__(self) -> int:
        return len(self.amounts)

    @property
    def total(self) -> Fraction:
        return sum(self.amounts, ZERO)

    @classmethod
    def zeros(cls, n_agents: int) -> "PaymentVector":
        return cls(tuple(ZERO for _ in range(n_agents)))

    @classmethod
    def of(cls, amounts: Sequence) -> "PaymentVector":
        return cls(tuple(Fraction(a) for a in amounts))


@dataclass(frozen=True)
class Solution:
    orientation: Orientation
    payments: PaymentVector
    algorithm: str = "unknown"
    bound: Optional[Fraction] = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def total_subsidy(self) -> Fraction:
        return self.payments.total
