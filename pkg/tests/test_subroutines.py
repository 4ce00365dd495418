import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.app.core.errors import InputError
from backend.app.models.instance import MonotoneFamily, additive_instance, monotone_instance
from backend.app.services.envy_service import pair_local_efable
from backend.app.services.subroutines import envy_cycle_two, is_ef1, max_utility, round_robin

quarters = st.integers(min_value=0, max_value=4).map(lambda k: Fraction(k, 4))
item_rows = st.lists(st.tuples(quarters, quarters), min_size=0, max_size=10)
families = st.one_of(
    st.just(MonotoneFamily.plain()),
    st.sampled_from(["1/2", "1", "3/2"]).map(MonotoneFamily.capped),
    st.integers(min_value=1, max_value=3).map(MonotoneFamily.all_or_nothing),
    st.just(MonotoneFamily.unit_demand()),
)


def pair_instance(rows):
    return additive_instance(2, [(0, 1, a, b) for a, b in rows])


def test_round_robin_alternates():
    instance = pair_instance([(1, 1), ("1/2", 1), ("1/4", 0)])
    first, second = round_robin(instance, 0, 1, [0, 1, 2])
    assert first == (0, 2)
    assert second == (1,)


def test_round_robin_prefers_reserve():
    instance = pair_instance([(1, 1), (1, 1)])
    first, _ = round_robin(instance, 1, 0, [0, 1], prefer_reserve=1)
    assert first == (1,)


def test_subroutines_reject_foreign_edges():
    instance = additive_instance(3, [(0, 1, 1, 1), (1, 2, 1, 1)])
    with pytest.raises(InputError):
        round_robin(instance, 0, 1, [1])


def test_max_utility_ties_to_favored():
    instance = pair_instance([(1, 1), ("1/2", 1)])
    own, rest = max_utility(instance, 0, 1, [0, 1])
    assert own == (0,)
    assert rest == (1,)


@given(item_rows)
def test_round_robin_first_picker_envy_free(rows):
    instance = pair_instance(rows)
    items = range(len(rows))
    b_j, b_i = round_robin(instance, 1, 0, items)
    assert instance.value(1, b_j) >= instance.value(1, b_i)
    assert instance.value(0, b_j) - instance.value(0, b_i) <= 1
    if not pair_local_efable(instance, 1, 0, b_j, b_i):
        assert instance.value(1, b_j) - instance.value(1, b_i) <= 1


@given(item_rows)
def test_max_utility_gives_advantage_agent_a_unit(rows):
    instance = pair_instance(rows)
    own, _ = max_utility(instance, 1, 0, range(len(rows)))
    if any(b == 1 for _, b in rows):
        assert instance.value(1, own) >= 1


@given(st.lists(st.tuples(quarters, quarters), min_size=0, max_size=8))
def test_max_utility_maximizes_joint_value(rows):
    instance = pair_instance(rows)
    own, rest = max_utility(instance, 0, 1, range(len(rows)))
    best = instance.value(0, own) + instance.value(1, rest)
    for mask in itertools.product((0, 1), repeat=len(rows)):
        mine = [e for e, bit in enumerate(mask) if bit == 0]
        theirs = [e for e, bit in enumerate(mask) if bit == 1]
        assert instance.value(0, mine) + instance.value(1, theirs) <= best


@given(item_rows, families, families)
def test_envy_cycle_two_is_ef1(rows, family_a, family_b):
    instance = monotone_instance(2, [(0, 1, a, b) for a, b in rows], [family_a, family_b])
    items = list(range(len(rows)))
    bundle_a, bundle_b = envy_cycle_two(instance, 0, 1, items)
    assert sorted(bundle_a + bundle_b) == items
    assert is_ef1(instance, 0, bundle_a, bundle_b)
    assert is_ef1(instance, 1, bundle_b, bundle_a)
    # after the final swap at most one agent envies the other
    envies_a = instance.value(0, bundle_b) > instance.value(0, bundle_a)
    envies_b = instance.value(1, bundle_a) > instance.value(1, bundle_b)
    assert not (envies_a and envies_b)
