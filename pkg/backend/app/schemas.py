from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field


# Instance Schemas
class EdgeSchema(BaseModel):
    id: int = Field(..., ge=0)
    u: int = Field(..., ge=0)
    v: int = Field(..., ge=0)
    vu: Union[str, int] = "0"
    vv: Union[str, int] = "0"


class FamilySchema(BaseModel):
    family: Literal["additive", "additive_capped", "all_or_nothing_degree", "unit_demand"]
    params: Dict[str, Any] = Field(default_factory=dict)


class ValuationSchema(BaseModel):
    # "additive", one family shared by every agent, or "monotone" with one family per agent
    type: Union[Literal["additive", "monotone"], FamilySchema] = "additive"
    families: Optional[List[FamilySchema]] = None


class InstanceSchema(BaseModel):
    agents: int = Field(..., ge=1)
    edges: List[EdgeSchema] = Field(default_factory=list)
    valuation: ValuationSchema = Field(default_factory=ValuationSchema)
    label: Optional[str] = None


# Solution Schemas
class SolutionSchema(BaseModel):
    orientation: Dict[str, int]
    payments: List[Union[str, int]]
    total_subsidy: Optional[str] = None
    bound_used: Optional[str] = None
    algorithm: str = "unknown"
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    payments_decimal: Optional[List[str]] = Field(None, description="Non-authoritative 6-place approximation")


class VerifyRequest(BaseModel):
    instance: InstanceSchema
    solution: SolutionSchema


class VerificationReportSchema(BaseModel):
    checks: Dict[str, bool]
    all_pass: bool
    total_subsidy: Optional[str] = None
    details: Dict[str, str] = Field(default_factory=dict)


class OracleResultSchema(BaseModel):
    min_total: str
    ef_zero_exists: bool
    visited: int
    argmin: SolutionSchema


class GenerateRequest(BaseModel):
    pairs: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    epsilon: Optional[str] = None
    seed: int = 0
    kind: Optional[str] = None
    simple: bool = False
    cover: bool = False
    dimacs: Optional[str] = None
