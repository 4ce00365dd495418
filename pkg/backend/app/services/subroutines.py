"""Two-agent allocation primitives shared by the solvers.

All three return a partition of ``items`` as a pair of sorted tuples, in the
order of the agents passed in.
"""

from typing import Iterable, Optional

from ..core.errors import InputError
from ..models.instance import Instance


def _checked_items(instance: Instance, a: int, b: int, items: Iterable[int]) -> list[int]:
    items = sorted(set(items))
    instance.graph.check_agent(a)
    instance.graph.check_agent(b)
    allowed = set(instance.graph.between(a, b))
    for e in items:
        if e not in allowed:
            raise InputError(f"edge {e} does not join agents {a} and {b}")
    return items


def round_robin(
    instance: Instance,
    first: int,
    second: int,
    items: Iterable[int],
    prefer_reserve: Optional[int] = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Alternate picks starting with ``first``; each picker takes a max-value item.

    Ties go to ``prefer_reserve`` when it is among the tied items, otherwise to
    the lowest edge id.
    """
    remaining = _checked_items(instance, first, second, items)
    picked: dict[int, list[int]] = {first: [], second: []}
    picker = first
    while remaining:
        top = max(instance.item_value(picker, e) for e in remaining)
        tied = [e for e in remaining if instance.item_value(picker, e) == top]
        choice = prefer_reserve if prefer_reserve in tied else tied[0]
        remaining.remove(choice)
        picked[picker].append(choice)
        picker = second if picker == first else first
    return tuple(sorted(picked[first])), tuple(sorted(picked[second]))


def envy_cycle_two(
    instance: Instance,
    a: int,
    b: int,
    items: Iterable[int],
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Two-agent envy-cycle elimination; the result is EF1 for monotone valuations."""
    remaining = _checked_items(instance, a, b, items)
    bundles: dict[int, list[int]] = {a: [], b: []}

    def envies(x: int, y: int) -> bool:
        return instance.value(x, bundles[y]) > instance.value(x, bundles[x])

    def swap_if_mutual() -> None:
        if envies(a, b) and envies(b, a):
            bundles[a], bundles[b] = bundles[b], bundles[a]

    while remaining:
        swap_if_mutual()
        receiver = a if not envies(b, a) else b
        current = instance.value(receiver, bundles[receiver])
        best, choice = None, None
        for e in remaining:
            gain = instance.value(receiver, bundles[receiver] + [e]) - current
            if best is None or gain > best:
                best, choice = gain, e
        remaining.remove(choice)
        bundles[receiver].append(choice)
    swap_if_mutual()
    return tuple(sorted(bundles[a])), tuple(sorted(bundles[b]))


def max_utility(
    instance: Instance,
    favored: int,
    other: int,
    items: Iterable[int],
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Each item to its strictly higher valuer; exact ties to ``favored``."""
    own, rest = [], []
    for e in _checked_items(instance, favored, other, items):
        if instance.item_value(favored, e) >= instance.item_value(other, e):
            own.append(e)
        else:
            rest.append(e)
    return tuple(own), tuple(rest)


def is_ef1(instance: Instance, agent: int, own: Iterable[int], other: Iterable[int]) -> bool:
    own, other = list(own), list(other)
    mine = instance.value(agent, own)
    if mine >= instance.value(agent, other):
        return True
    return any(mine >= instance.value(agent, [e for e in other if e != g]) for g in other)
