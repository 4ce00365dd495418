"""Exception hierarchy shared by the model, the solvers, the CLI and the API.

Every error carries a machine-readable ``reason`` and maps to a stable CLI exit
code and HTTP status.
"""

from fractions import Fraction
from typing import Optional, Sequence


class OrientationError(Exception):
    reason = "orientation_error"
    exit_code = 1
    http_status = 500

    def __init__(self, message: str, reason: Optional[str] = None):
        super().__init__(message)
        if reason:
            self.reason = reason

    def to_dict(self) -> dict:
        return {"error": self.reason, "detail": str(self)}


class InputError(OrientationError):
    reason = "input_error"
    exit_code = 2
    http_status = 400


class PreconditionError(OrientationError):
    reason = "precondition_failed"
    exit_code = 3
    http_status = 422


class NormalizationError(PreconditionError):
    reason = "not_normalized"


class OracleRefusal(PreconditionError):
    reason = "too_many_edges"


class NotEnvyFreeable(OrientationError):
    reason = "not_envy_freeable"
    exit_code = 3
    http_status = 422

    def __init__(self, message: str, cycle: Sequence[int] = (), weight: Optional[Fraction] = None):
        super().__init__(message)
        self.cycle = tuple(cycle)
        self.weight = weight


class InvariantViolation(OrientationError):
    reason = "invariant_violation"
