from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.app.core.errors import InputError, NormalizationError
from backend.app.models.instance import (
    Edge,
    MonotoneFamily,
    MultiGraph,
    additive_instance,
    check_normalization,
    is_unit_normalized,
    max_marginal_at_most_one,
    monotone_instance,
    normalize_additive,
    positive_part,
    value,
)
from backend.app.models.solution import Orientation, PaymentVector
from backend.app.services import instance_service


def test_self_loop_is_rejected():
    with pytest.raises(InputError):
        Edge(0, 2, 2)


def test_edge_ids_must_be_dense():
    with pytest.raises(InputError):
        MultiGraph(2, (Edge(1, 0, 1),))


def test_endpoint_out_of_range():
    with pytest.raises(InputError):
        MultiGraph.from_pairs(2, [(0, 2)])


def test_parallel_edges_and_adjacency():
    graph = MultiGraph.from_pairs(3, [(0, 1), (1, 0), (1, 2)])
    assert graph.between(1, 0) == (0, 1)
    assert graph.incident(1) == (0, 1, 2)
    assert graph.neighbors(1) == (0, 2)
    assert graph.adjacent_pairs() == [(0, 1), (1, 2)]
    assert not graph.is_simple()


def test_value_ignores_non_incident_edges():
    instance = additive_instance(3, [(0, 1, 1, "1/2"), (1, 2, "1/3", 1)])
    assert value(instance, 0, [0, 1]) == 1
    assert value(instance, 1, [0, 1]) == Fraction(5, 6)
    assert value(instance, 2, []) == 0


def test_value_rejects_unknown_agent_and_edge():
    instance = additive_instance(2, [(0, 1, 1, 1)])
    with pytest.raises(InputError):
        instance.value(5, [0])
    with pytest.raises(InputError):
        instance.value(0, [3])


def test_families_evaluate():
    edges = [(0, 1, "1/2", 1), (0, 2, "1/2", 1), (0, 3, "1/4", 1)]
    instance = monotone_instance(
        4,
        edges,
        [MonotoneFamily.capped("3/4"), MonotoneFamily.all_or_nothing(1), MonotoneFamily.unit_demand(), MonotoneFamily.plain()],
    )
    assert instance.value(0, [0, 1, 2]) == Fraction(3, 4)
    assert instance.value(1, [0]) == 1
    assert instance.value(1, [1]) == 0
    assert instance.value(2, [1, 2]) == 1


def test_all_or_nothing_threshold():
    family = MonotoneFamily.all_or_nothing(2)
    assert family.evaluate([Fraction(1)]) == 0
    assert family.evaluate([Fraction(0), Fraction(0)]) == 1
    assert family.max_marginal([Fraction(1)]) == 0
    assert family.max_marginal([Fraction(1)] * 3) == 1


def test_check_normalization_reports_per_agent():
    instance = additive_instance(3, [(0, 1, 1, "1/2"), (1, 2, "1/2", 2)])
    reports = check_normalization(instance)
    assert reports[0].is_unit
    assert reports[1].max_marginal == Fraction(1, 2)
    assert reports[2].max_marginal == 2
    assert not max_marginal_at_most_one(instance)
    assert not is_unit_normalized(instance)


def test_normalize_additive_scales_each_agent():
    instance = normalize_additive(additive_instance(3, [(0, 1, 2, 4), (1, 2, 2, 3)]))
    assert instance.item_value(0, 0) == 1
    assert instance.item_value(1, 0) == 1
    assert instance.item_value(1, 1) == Fraction(1, 2)
    assert is_unit_normalized(instance)


def test_normalize_additive_degenerate_agent():
    with pytest.raises(NormalizationError) as err:
        normalize_additive(additive_instance(2, [(0, 1, 0, 1)]))
    assert err.value.reason == "degenerate_agent"


def test_orientation_validation():
    graph = MultiGraph.from_pairs(3, [(0, 1), (1, 2)])
    Orientation((0, 2)).validate(graph)
    with pytest.raises(InputError):
        Orientation((2, 2)).validate(graph)
    with pytest.raises(InputError):
        Orientation((0,)).validate(graph)


def test_restricted_bundles():
    graph = MultiGraph.from_pairs(2, [(0, 1), (0, 1), (0, 1)])
    orientation = Orientation((0, 1, 0))
    assert orientation.restricted(graph, 0, 1) == {0, 2}
    assert orientation.restricted(graph, 1, 0) == {1}


def test_negative_payment_rejected():
    with pytest.raises(InputError):
        PaymentVector.of([0, "-1/2"])


@given(st.fractions(min_value=-5, max_value=5))
def test_positive_part(d):
    assert positive_part(d) == max(d, 0)


@given(st.lists(st.fractions(min_value=0, max_value=1), min_size=1, max_size=6))
def test_capped_never_exceeds_cap(values):
    family = MonotoneFamily.capped("1/2")
    assert family.evaluate(values) <= Fraction(1, 2)
    assert family.evaluate(values) == min(Fraction(1, 2), sum(values))


FAMILIES = [
    MonotoneFamily.plain(),
    MonotoneFamily.capped("1/2"),
    MonotoneFamily.all_or_nothing(2),
    MonotoneFamily.unit_demand(),
]


def rows_of(instance):
    return [(e.u, e.v, instance.item_value(e.u, e.id), instance.item_value(e.v, e.id)) for e in instance.graph.edges]


def random_subset(rng, items):
    return [e for e in items if rng.integers(0, 2)]


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.kind.value)
@given(seed=st.integers(0, 10_000))
def test_value_is_monotone_under_inclusion(family, seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 5
    base = instance_service.gen_random(seed, n, n + seed % 4, "monotone-family")
    instance = monotone_instance(n, rows_of(base), [family] * n)
    agent = int(rng.integers(0, n))
    larger = random_subset(rng, range(instance.m))
    smaller = random_subset(rng, larger)
    assert instance.value(agent, smaller) <= instance.value(agent, larger)


@given(seed=st.integers(0, 10_000))
def test_injected_non_incident_edges_change_nothing(seed):
    rng = np.random.default_rng(seed)
    n = 3 + seed % 4
    instance = instance_service.gen_random(seed, n, n + seed % 5, "monotone-family")
    agent = int(rng.integers(0, n))
    incident = set(instance.graph.incident(agent))
    bundle = random_subset(rng, sorted(incident))
    foreign = random_subset(rng, [e for e in range(instance.m) if e not in incident])
    assert instance.value(agent, bundle + foreign) == instance.value(agent, bundle)


@given(seed=st.integers(0, 10_000))
def test_normalize_additive_is_idempotent_and_keeps_top_edges(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 6
    base = instance_service.gen_random(seed, n, n + seed % 5, "bivalued12", cover=True)
    scaled = additive_instance(
        n, [(u, v, vu * int(rng.integers(1, 6)), vv * int(rng.integers(1, 6))) for u, v, vu, vv in rows_of(base)]
    )
    once = normalize_additive(scaled)
    twice = normalize_additive(once)
    assert is_unit_normalized(once)
    assert twice.valuations.values == once.valuations.values
    for agent in range(n):
        incident = scaled.graph.incident(agent)

        def top_edges(inst):
            best = max(inst.item_value(agent, e) for e in incident)
            return {e for e in incident if inst.item_value(agent, e) == best}

        assert top_edges(once) == top_edges(scaled)
