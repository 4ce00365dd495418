from dataclasses import replace

import pytest

from backend.app.core.errors import OracleRefusal
from backend.app.models.instance import additive_instance
from backend.app.models.solution import PaymentVector
from backend.app.services import instance_service
from backend.app.services.binary_solver import solve_binary
from backend.app.services.oracle_service import (
    brute_force_min_subsidy,
    ef_orientation_exists,
    iter_ef_orientations,
    orientation_at,
    verify_solution,
)
from backend.app.services.envy_service import is_ef_with_payments


def test_single_unit_edge():
    result = brute_force_min_subsidy(additive_instance(2, [(0, 1, 1, 1)]))
    assert result.min_total == 1
    assert result.visited == 2
    assert not result.ef_zero_exists
    # first orientation in counter order wins ties
    assert result.argmin.orientation.owner == (0,)


@pytest.mark.parametrize("pairs", [1, 2, 3, 4, 5])
def test_parallel_pairs_minimum(pairs):
    assert brute_force_min_subsidy(instance_service.gen_parallel_pairs(pairs)).min_total == pairs


def test_threshold_clique_minimum(threshold_clique):
    assert brute_force_min_subsidy(threshold_clique).min_total == 3


def test_threshold_clique_six():
    assert brute_force_min_subsidy(instance_service.gen_threshold_clique(6)).min_total == 4


def test_refuses_large_instances():
    with pytest.raises(OracleRefusal) as err:
        brute_force_min_subsidy(instance_service.gen_parallel_pairs(5), max_edges=4)
    assert err.value.reason == "too_many_edges"


def test_counter_order():
    instance = additive_instance(3, [(0, 1, 1, 1), (1, 2, 1, 1)])
    assert orientation_at(instance, 0).owner == (0, 1)
    assert orientation_at(instance, 3).owner == (1, 2)


def test_parallel_jobs_agree(monkeypatch):
    from backend.app.core.config import settings

    monkeypatch.setattr(settings, "ORACLE_CHUNK_SIZE", 4)
    instance = instance_service.gen_random(3, 5, 7, "additive-unit")
    serial = brute_force_min_subsidy(instance, jobs=1)
    parallel = brute_force_min_subsidy(instance, jobs=2)
    assert serial.min_total == parallel.min_total
    assert serial.argmin.orientation == parallel.argmin.orientation
    assert parallel.visited == 2 ** instance.m


def test_monotone_profiles_use_exact_path(locally_efable_cycle):
    instance, _ = locally_efable_cycle
    result = brute_force_min_subsidy(instance)
    assert result.visited == 64
    assert is_ef_with_payments(instance, result.argmin.orientation, result.argmin.payments)


def test_verify_solver_output():
    instance = instance_service.gen_parallel_pairs(2)
    report = verify_solution(instance, solve_binary(instance))
    assert report.all_pass
    assert report.total_subsidy == 2


def test_verify_catches_corrupted_payment():
    instance = instance_service.gen_parallel_pairs(2)
    solution = solve_binary(instance)
    broken = replace(solution, payments=PaymentVector.zeros(4), bound=None)
    report = verify_solution(instance, broken)
    assert report.checks["envy_freeable"]
    assert not report.checks["ef_with_payments"]
    assert not report.all_pass


def test_verify_rejects_non_efable(locally_efable_cycle):
    instance, orientation = locally_efable_cycle
    solution = solve_binary(instance_service.gen_parallel_pairs(1))
    forged = replace(solution, orientation=orientation, payments=PaymentVector.of([5, 5, 5]), bound=None)
    report = verify_solution(instance, forged)
    assert not report.checks["envy_freeable"]
    assert not report.all_pass


def test_verify_reports_invalid_orientation():
    instance = additive_instance(3, [(0, 1, 1, 1)])
    solution = solve_binary(additive_instance(3, [(1, 2, 1, 1)]))
    report = verify_solution(instance, replace(solution, orientation=replace(solution.orientation, owner=(2,))))
    assert report.checks == {"orientation_valid": False}


def test_ef_search_matches_enumeration():
    for seed in range(15):
        instance = instance_service.gen_random(seed, 4, 6, "bivalued12")
        found = list(iter_ef_orientations(instance))
        assert ef_orientation_exists(instance) == bool(found)
        assert ef_orientation_exists(instance) == brute_force_min_subsidy(instance).ef_zero_exists
        for orientation in found:
            assert is_ef_with_payments(instance, orientation, PaymentVector.zeros(4))
