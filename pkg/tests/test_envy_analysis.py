from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.app.core.errors import NotEnvyFreeable
from backend.app.models.instance import additive_instance
from backend.app.models.solution import Orientation, PaymentVector
from backend.app.services import instance_service
from backend.app.services.envy_service import (
    EnvyGraph,
    build_envy_graph,
    cycle_weight,
    find_positive_cycle,
    is_ef_with_payments,
    is_envy_freeable,
    local_efable,
    longest_path_payments,
    min_payments,
)
from backend.app.services.oracle_service import permutation_efable, verify_payment_minimality


def test_single_unit_edge_needs_one():
    instance = additive_instance(2, [(0, 1, 1, 1)])
    payments = min_payments(instance, Orientation((0,)))
    assert payments.amounts == (0, 1)
    assert payments.total == 1


def test_envy_graph_weights():
    instance = additive_instance(3, [(0, 1, 1, "1/2"), (1, 2, "1/3", 1)])
    graph = build_envy_graph(instance, Orientation((1, 2)))
    assert graph.weight[0][1] == 1
    assert graph.weight[1][2] == Fraction(1, 3) - Fraction(1, 2)
    assert graph.weight[2][0] == -1


def test_longest_path_on_chain():
    graph = EnvyGraph.from_matrix([[0, 2, -5], [-3, 0, 1], [-5, -5, 0]])
    assert longest_path_payments(graph) == [3, 1, 0]


def test_positive_cycle_detected():
    graph = EnvyGraph.from_matrix([[0, 1, -5], [-5, 0, 1], [1, -5, 0]])
    assert longest_path_payments(graph) is None
    cycle, weight = find_positive_cycle(graph)
    assert weight == 3
    assert sorted(cycle) == [0, 1, 2]


def test_no_cycle_reported_when_freeable():
    graph = EnvyGraph.from_matrix([[0, 1], [-1, 0]])
    assert find_positive_cycle(graph) is None


def test_locally_efable_but_not_efable(locally_efable_cycle):
    instance, orientation = locally_efable_cycle
    for i, j in instance.graph.adjacent_pairs():
        assert local_efable(instance, orientation, i, j)
    assert not is_envy_freeable(instance, orientation)
    with pytest.raises(NotEnvyFreeable) as err:
        min_payments(instance, orientation)
    assert err.value.weight == 1
    graph = build_envy_graph(instance, orientation)
    assert cycle_weight(graph, [0, 1, 2]) == 1
    assert sorted(err.value.cycle) == [0, 1, 2]


def test_cycle_fixture_permutation_characterization(locally_efable_cycle):
    instance, orientation = locally_efable_cycle
    assert not permutation_efable(instance, orientation)


def test_ef_with_payments_tolerates_nothing():
    instance = additive_instance(2, [(0, 1, 1, 1)])
    orientation = Orientation((0,))
    assert is_ef_with_payments(instance, orientation, PaymentVector.of([0, 1]))
    assert not is_ef_with_payments(instance, orientation, PaymentVector.of([0, "999/1000"]))


def test_min_payments_are_minimal(appendix_path):
    orientation = Orientation((0, 2, 2, 4))
    payments = min_payments(appendix_path, orientation)
    assert verify_payment_minimality(appendix_path, orientation, payments)
    assert is_ef_with_payments(appendix_path, orientation, payments)
    assert any(p == 0 for p in payments.amounts)


KINDS = ("binary", "bivalued12", "additive-unit", "monotone-family")


def random_oriented(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 5
    instance = instance_service.gen_random(seed, n, n + seed % 4, KINDS[seed % len(KINDS)])
    orientation = Orientation(tuple(e.endpoints[int(rng.integers(0, 2))] for e in instance.graph.edges))
    return instance, orientation


@given(seed=st.integers(0, 10_000))
def test_envy_freeable_iff_no_welfare_raising_permutation(seed):
    instance, orientation = random_oriented(seed)
    assert is_envy_freeable(instance, orientation) == permutation_efable(instance, orientation)


@given(seed=st.integers(0, 10_000))
def test_min_payments_match_heaviest_paths(seed):
    instance, orientation = random_oriented(seed)
    if not is_envy_freeable(instance, orientation):
        with pytest.raises(NotEnvyFreeable):
            min_payments(instance, orientation)
        return
    payments = min_payments(instance, orientation)
    assert verify_payment_minimality(instance, orientation, payments)
    assert is_ef_with_payments(instance, orientation, payments)
    assert any(p == 0 for p in payments.amounts)
