import logging
from enum import Enum
from typing import Callable, List

from ..core.config import settings
from ..core.errors import InputError
from ..models.instance import Instance, is_unit_normalized, max_marginal_at_most_one
from ..models.solution import Solution
from .additive_solver import solve_additive_multigraph
from .binary_solver import solve_binary
from .monotone_solver import solve_monotone_multigraph
from .simple_solver import has_anchor, solve_simple_monotone


class Algorithm(str, Enum):
    AUTO = "auto"
    BINARY = "binary"
    MONOTONE_MULTI = "monotone-multi"
    ADDITIVE_MULTI = "additive-multi"
    SIMPLE_MONOTONE = "simple-monotone"


SOLVERS: dict[Algorithm, Callable[[Instance], Solution]] = {
    Algorithm.BINARY: solve_binary,
    Algorithm.MONOTONE_MULTI: solve_monotone_multigraph,
    Algorithm.ADDITIVE_MULTI: solve_additive_multigraph,
    Algorithm.SIMPLE_MONOTONE: solve_simple_monotone,
}


class SolverService:
    """Routes an instance to the strongest solver whose preconditions it meets."""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @staticmethod
    def parse_algorithm(name: str) -> Algorithm:
        try:
            return Algorithm(name)
        except ValueError as err:
            choices = ", ".join(a.value for a in Algorithm)
            raise InputError(f"unknown algorithm {name!r}; choose from {choices}") from err

    @staticmethod
    def choose_algorithm(instance: Instance) -> Algorithm:
        if instance.valuations.is_binary():
            return Algorithm.BINARY
        if is_unit_normalized(instance):
            return Algorithm.ADDITIVE_MULTI
        simple = instance.graph.is_simple() and instance.n >= 3
        if simple and max_marginal_at_most_one(instance) and has_anchor(instance):
            return Algorithm.SIMPLE_MONOTONE
        return Algorithm.MONOTONE_MULTI

    @staticmethod
    def applicable(instance: Instance) -> List[Algorithm]:
        found = []
        if instance.valuations.is_binary():
            found.append(Algorithm.BINARY)
        bounded = max_marginal_at_most_one(instance)
        if bounded:
            found.append(Algorithm.MONOTONE_MULTI)
        if is_unit_normalized(instance):
            found.append(Algorithm.ADDITIVE_MULTI)
        if bounded and instance.graph.is_simple() and has_anchor(instance):
            found.append(Algorithm.SIMPLE_MONOTONE)
        return found

    def solve(self, instance: Instance, algo: str = None) -> Solution:
        requested = self.parse_algorithm(algo or settings.DEFAULT_ALGO)
        chosen = self.choose_algorithm(instance) if requested is Algorithm.AUTO else requested
        self.logger.info("Solving %s (n=%s, m=%s) with %s", instance.label or "instance", instance.n, instance.m, chosen.value)
        return SOLVERS[chosen](instance)


solver_service = SolverService()
