"""JSON (de)serialization for instances, solutions and reports.

Rationals travel as strings ("p/q" or "p") so nothing passes through floats.
They are parsed into reduced ``Fraction``s and always written in lowest terms
with a positive denominator, so a document round-trips byte for byte only when
its rationals are already canonical: "2/4" comes back as "1/2" and "3/1" as "3".
"""

import json
import sys
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

from .. import schemas
from ..core.errors import InputError
from ..models.instance import FamilyKind, Instance, MonotoneFamily, MultiGraph, Edge, ValuationProfile
from ..models.solution import Orientation, PaymentVector, Solution


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: Union[str, int]) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"rationals must be strings or integers, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"bad rational {text!r}") from err


def decimal_string(x: Fraction, places: int = 6) -> str:
    return f"{Decimal(x.numerator) / Decimal(x.denominator):.{places}f}"


def jsonable(value: Any) -> Any:
    """Diagnostics to plain JSON: Fractions become rational strings."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [jsonable(v) for v in items]
    return value


def _validated(model, data: Any):
    try:
        return model.model_validate(data)
    except ValidationError as err:
        raise InputError(f"invalid {model.__name__}: {err.errors()[0]['msg']}") from err


def _family_from_schema(schema: schemas.FamilySchema) -> MonotoneFamily:
    kind = FamilyKind(schema.family)
    if kind is FamilyKind.ADDITIVE_CAPPED:
        if "cap" not in schema.params:
            raise InputError("additive_capped needs a 'cap' parameter")
        return MonotoneFamily.capped(parse_rational(schema.params["cap"]))
    if kind is FamilyKind.ALL_OR_NOTHING_DEGREE:
        threshold = schema.params.get("threshold")
        if not isinstance(threshold, int):
            raise InputError("all_or_nothing_degree needs an integer 'threshold' parameter")
        return MonotoneFamily.all_or_nothing(threshold)
    return MonotoneFamily(kind)


def _family_to_dict(family: MonotoneFamily) -> dict:
    params: dict[str, Any] = {}
    if family.kind is FamilyKind.ADDITIVE_CAPPED:
        params["cap"] = format_rational(family.cap)
    elif family.kind is FamilyKind.ALL_OR_NOTHING_DEGREE:
        params["threshold"] = family.threshold
    return {"family": family.kind.value, "params": params}


def instance_from_dict(data: Any) -> Instance:
    schema = _validated(schemas.InstanceSchema, data)
    edges, values = [], {}
    for position, row in enumerate(schema.edges):
        if row.id != position:
            raise InputError(f"edge ids must be 0..m-1 in order, found {row.id} at position {position}")
        edges.append(Edge(row.id, row.u, row.v))
        values[(row.id, row.u)] = parse_rational(row.vu)
        values[(row.id, row.v)] = parse_rational(row.vv)

    valuation = schema.valuation
    families = None
    if isinstance(valuation.type, schemas.FamilySchema):
        families = tuple(_family_from_schema(valuation.type) for _ in range(schema.agents))
    elif valuation.type == "monotone":
        if valuation.families is None or len(valuation.families) != schema.agents:
            raise InputError("a monotone valuation needs one family per agent")
        families = tuple(_family_from_schema(f) for f in valuation.families)

    graph = MultiGraph(schema.agents, tuple(edges))
    return Instance(graph, ValuationProfile(values, families), label=schema.label)


def instance_to_dict(instance: Instance) -> dict:
    edges = [
        {
            "id": edge.id,
            "u": edge.u,
            "v": edge.v,
            "vu": format_rational(instance.item_value(edge.u, edge.id)),
            "vv": format_rational(instance.item_value(edge.v, edge.id)),
        }
        for edge in instance.graph.edges
    ]
    families = instance.valuations.families
    if families is None:
        valuation: dict[str, Any] = {"type": "additive"}
    else:
        valuation = {"type": "monotone", "families": [_family_to_dict(f) for f in families]}
    data = {"agents": instance.n, "edges": edges, "valuation": valuation}
    if instance.label:
        data["label"] = instance.label
    return data


def solution_to_dict(solution: Solution) -> dict:
    payments = solution.payments.amounts
    return {
        "algorithm": solution.algorithm,
        "orientation": {str(e): owner for e, owner in enumerate(solution.orientation.owner)},
        "payments": [format_rational(p) for p in payments],
        "payments_decimal": [decimal_string(p) for p in payments],
        "total_subsidy": format_rational(solution.total_subsidy),
        "bound_used": None if solution.bound is None else format_rational(solution.bound),
        "diagnostics": jsonable(solution.diagnostics),
    }


def solution_from_dict(data: Any) -> Solution:
    schema = _validated(schemas.SolutionSchema, data)
    try:
        keys = sorted(int(k) for k in schema.orientation)
    except ValueError as err:
        raise InputError("orientation keys must be edge ids") from err
    if keys != list(range(len(keys))):
        raise InputError("orientation must cover edge ids 0..m-1")
    owner = tuple(schema.orientation[str(e)] for e in keys)
    return Solution(
        orientation=Orientation(owner),
        payments=PaymentVector(tuple(parse_rational(p) for p in schema.payments)),
        algorithm=schema.algorithm,
        bound=None if schema.bound_used is None else parse_rational(schema.bound_used),
        diagnostics=schema.diagnostics,
    )


def report_to_dict(report) -> dict:
    return {
        "checks": dict(report.checks),
        "all_pass": report.all_pass,
        "total_subsidy": None if report.total_subsidy is None else format_rational(report.total_subsidy),
        "details": dict(report.details),
    }


def oracle_to_dict(result) -> dict:
    return {
        "min_total": format_rational(result.min_total),
        "ef_zero_exists": result.ef_zero_exists,
        "visited": result.visited,
        "argmin": solution_to_dict(result.argmin),
    }


def load_json(path: Optional[Union[str, Path]] = None) -> Any:
    """Read JSON from ``path``, or stdin when no path is given."""
    try:
        if path is None or str(path) == "-":
            return json.load(sys.stdin)
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as err:
        raise InputError(f"invalid JSON: {err}") from err
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from err


def dump_json(data: Any, path: Optional[Union[str, Path]] = None) -> None:
    text = json.dumps(data, indent=2)
    if path is None or str(path) == "-":
        sys.stdout.write(text + "\n")
        return
    with open(path, "w") as f:
        f.write(text + "\n")
