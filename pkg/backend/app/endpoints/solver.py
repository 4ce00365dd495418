from fractions import Fraction
from typing import Optional

from fastapi import APIRouter, HTTPException, Query

from .. import schemas
from ..core.errors import InputError, OrientationError
from ..services import instance_service
from ..services.oracle_service import brute_force_min_subsidy, verify_solution
from ..services.solver_service import solver_service
from ..utils.serialization import (
    instance_from_dict,
    instance_to_dict,
    oracle_to_dict,
    report_to_dict,
    solution_from_dict,
    solution_to_dict,
)

router = APIRouter()


def _http_error(err: OrientationError) -> HTTPException:
    return HTTPException(status_code=err.http_status, detail=err.to_dict())


@router.post("/solve", response_model=schemas.SolutionSchema)
def solve(instance: schemas.InstanceSchema, algo: str = Query("auto")):
    try:
        solution = solver_service.solve(instance_from_dict(instance.model_dump()), algo)
        return solution_to_dict(solution)
    except OrientationError as e:
        raise _http_error(e)


@router.post("/verify", response_model=schemas.VerificationReportSchema)
def verify(request: schemas.VerifyRequest):
    try:
        instance = instance_from_dict(request.instance.model_dump())
        solution = solution_from_dict(request.solution.model_dump())
        return report_to_dict(verify_solution(instance, solution))
    except OrientationError as e:
        raise _http_error(e)


@router.post("/oracle", response_model=schemas.OracleResultSchema)
def oracle(instance: schemas.InstanceSchema, max_edges: Optional[int] = Query(None, ge=1)):
    try:
        result = brute_force_min_subsidy(instance_from_dict(instance.model_dump()), max_edges=max_edges)
        return oracle_to_dict(result)
    except OrientationError as e:
        raise _http_error(e)


@router.post("/generate/{family}", response_model=schemas.InstanceSchema)
def generate(family: str, params: schemas.GenerateRequest):
    try:
        if family == "parallel-pairs":
            instance = instance_service.gen_parallel_pairs(params.pairs or 2)
        elif family == "threshold-clique":
            instance = instance_service.gen_threshold_clique(params.n or 5)
        elif family == "appendix-path":
            instance = instance_service.gen_appendix_path(Fraction(params.epsilon or "1/100"))
        elif family == "random":
            instance = instance_service.gen_random(
                params.seed, params.n or 5, params.m or 8, params.kind or "additive-unit",
                simple=params.simple,
                cover=params.cover,
            )
        elif family == "locally-efable-cycle":
            instance, _ = instance_service.gen_locally_efable_cycle()
        elif family == "sat":
            formula = (
                instance_service.parse_dimacs(params.dimacs)
                if params.dimacs
                else instance_service.random_2p2n_formula(params.seed, params.n or 3)
            )
            instance = instance_service.gen_from_2p2n3sat(formula)
        else:
            raise InputError(f"unknown generator family {family!r}")
        return instance_to_dict(instance)
    except (ValueError, ZeroDivisionError) as e:
        raise HTTPException(status_code=400, detail={"error": "input_error", "detail": str(e)})
    except OrientationError as e:
        raise _http_error(e)
