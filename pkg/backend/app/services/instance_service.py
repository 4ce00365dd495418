"""Instance generators: the 2P2N-3SAT reduction, tightness fixtures and random corpora."""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from ..core.errors import InputError
from ..models.instance import (
    ONE,
    Instance,
    MonotoneFamily,
    additive_instance,
    monotone_instance,
    normalize_additive,
)
from ..models.solution import Orientation

logger = logging.getLogger(__name__)

RANDOM_KINDS = ("binary", "bivalued12", "additive-unit", "monotone-family")


@dataclass(frozen=True)
class Formula:
    """CNF over variables 1..n_vars; literals are signed DIMACS integers."""

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses))
        if self.n_vars < 1:
            raise InputError("a formula needs at least one variable")
        for index, clause in enumerate(self.clauses):
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise InputError(f"clause {index} has literal {lit} outside 1..{self.n_vars}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self, lit: int) -> int:
        return sum(clause.count(lit) for clause in self.clauses)

    def check_2p2n(self) -> None:
        for index, clause in enumerate(self.clauses):
            if len(clause) != 3 or len(set(clause)) != 3:
                raise InputError(f"clause {index} must hold three distinct literals")
        for var in range(1, self.n_vars + 1):
            pos, neg = self.occurrences(var), self.occurrences(-var)
            if pos != 2 or neg != 2:
                raise InputError(f"variable {var} occurs {pos} times positively and {neg} times negatively")

    def evaluate(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses)


def parse_dimacs(text: str) -> Formula:
    n_vars, clauses, current = None, [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad DIMACS header: {line!r}")
            n_vars = int(parts[2])
            continue
        try:
            numbers = [int(tok) for tok in line.split()]
        except ValueError as err:
            raise InputError(f"bad DIMACS clause line: {line!r}") from err
        for lit in numbers:
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        raise InputError("DIMACS text has no 'p cnf' header")
    return Formula(n_vars, tuple(clauses))


def format_dimacs(formula: Formula) -> str:
    lines = [f"p cnf {formula.n_vars} {formula.m}"]
    lines.extend(" ".join(str(l) for l in clause) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def satisfying_assignments(formula: Formula, max_vars: int = 20) -> Iterator[tuple[bool, ...]]:
    if formula.n_vars > max_vars:
        raise InputError(f"exhaustive search is limited to {max_vars} variables")
    for bits in itertools.product((False, True), repeat=formula.n_vars):
        if formula.evaluate(bits):
            yield bits


def is_satisfiable(formula: Formula) -> bool:
    return next(satisfying_assignments(formula), None) is not None


def random_2p2n_formula(seed: int, n_vars: int, max_tries: int = 1000) -> Formula:
    """Random formula where every variable occurs twice positively and twice negatively."""
    if n_vars < 3 or n_vars % 3:
        raise InputError("a 2P2N-3SAT formula needs a positive multiple of 3 variables")
    rng = np.random.default_rng(seed)
    pool = [lit for var in range(1, n_vars + 1) for lit in (var, var, -var, -var)]
    for _ in range(max_tries):
        shuffled = [int(x) for x in rng.permutation(pool)]
        clauses = tuple(tuple(shuffled[k:k + 3]) for k in range(0, len(shuffled), 3))
        if all(len(set(c)) == 3 for c in clauses):
            return Formula(n_vars, clauses)
    raise InputError(f"no valid 2P2N formula found in {max_tries} shuffles")


def _literal_vertex(lit: int) -> int:
    var = abs(lit) - 1
    return 2 * var if lit > 0 else 2 * var + 1


def gen_from_2p2n3sat(formula: Formula) -> Instance:
    """Orientation instance that has a zero-subsidy EF orientation iff ``formula`` is satisfiable.

    Vertices: ``2k`` / ``2k+1`` for the positive / negative literal of variable
    ``k+1``, then ``V_j = 2n + j`` and ``D_j = 2n + m + j``. Edge ``k`` is the
    variable edge of variable ``k+1``. Values are already halved.
    """
    formula.check_2p2n()
    n, m = formula.n_vars, formula.m
    half = Fraction(1, 2)
    rows = [(2 * k, 2 * k + 1, 1, 1) for k in range(n)]
    for j, clause in enumerate(formula.clauses):
        for lit in clause:
            rows.append((_literal_vertex(lit), 2 * n + j, half, half))
    for j in range(m):
        rows.append((2 * n + m + j, 2 * n + j, half, half))

    instance = additive_instance(2 * n + 2 * m, rows, label="reduction")
    assert instance.n == 2 * m + 2 * n and instance.m == 5 * n + m
    return instance


def decode_assignment(formula: Formula, orientation: Orientation) -> tuple[bool, ...]:
    """x_k is true iff the positive literal vertex owns the variable edge."""
    return tuple(orientation.owner[k] == 2 * k for k in range(formula.n_vars))


def gen_parallel_pairs(pairs: int) -> Instance:
    if pairs < 1:
        raise InputError("pairs must be >= 1")
    return additive_instance(2 * pairs, [(2 * k, 2 * k + 1, 1, 1) for k in range(pairs)], label=f"parallel-pairs-{pairs}")


def gen_threshold_clique(n: int) -> Instance:
    """A unit edge on agents 0, 1 plus a K_{n-2} whose agents value only holding all their edges."""
    if n < 5:
        raise InputError("threshold clique needs n >= 5")
    rows = [(0, 1, 1, 1)]
    rows.extend((u, v, 1, 1) for u, v in itertools.combinations(range(2, n), 2))
    families = [MonotoneFamily.plain(), MonotoneFamily.plain()]
    families.extend(MonotoneFamily.all_or_nothing(n - 3) for _ in range(2, n))
    return monotone_instance(n, rows, families, label=f"threshold-clique-{n}")


def gen_appendix_path(epsilon) -> Instance:
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise InputError(f"epsilon must lie in (0, 1/2), got {eps}")
    rows = [
        (0, 1, 1, 1),
        (1, 2, eps * eps, 1),
        (2, 3, 1 - eps, eps),
        (3, 4, 1, 1),
    ]
    return additive_instance(5, rows, label=f"appendix-path-{eps}")


def gen_locally_efable_cycle() -> tuple[Instance, Orientation]:
    """Unit-demand triangle with doubled edges whose given orientation is locally EF-able on
    every pair but has a positive envy cycle 0 -> 1 -> 2 -> 0 of weight 1."""
    two_thirds = Fraction(2, 3)
    rows = [
        (0, 1, 1, two_thirds),
        (0, 1, two_thirds, 0),
        (1, 2, 1, two_thirds),
        (1, 2, two_thirds, 0),
        (2, 0, 1, two_thirds),
        (2, 0, two_thirds, 0),
    ]
    families = [MonotoneFamily.unit_demand() for _ in range(3)]
    instance = monotone_instance(3, rows, families, label="locally-efable-cycle")
    orientation = Orientation.from_bundles(6, {0: [1, 4], 1: [0, 3], 2: [2, 5]})
    return instance, orientation


def _random_pairs(rng: np.random.Generator, n: int, m: int, simple: bool, cover: bool) -> list[tuple[int, int]]:
    pairs: list[tuple[int, int]] = []
    if cover:
        order = [int(a) for a in rng.permutation(n)]
        for k in range(0, n, 2):
            u = order[k]
            v = order[k + 1] if k + 1 < n else order[0]
            pairs.append((u, v))
    if simple:
        chosen = {tuple(sorted(p)) for p in pairs}
        rest = [p for p in itertools.combinations(range(n), 2) if p not in chosen]
        extra = max(0, m - len(pairs))
        if extra > len(rest):
            raise InputError(f"a simple graph on {n} agents has at most {n * (n - 1) // 2} edges")
        picks = rng.choice(len(rest), size=extra, replace=False) if extra else []
        pairs.extend(rest[int(k)] for k in sorted(picks))
    else:
        while len(pairs) < m:
            u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
            pairs.append((u, v))
    return pairs


def gen_random(seed: int, n: int, m: int, kind: str, simple: bool = False, cover: bool = False) -> Instance:
    """Reproducible random instance.

    ``cover`` touches every agent with a first round of edges; ``additive-unit``
    always covers so it can be normalized. Covered bivalued and monotone-family
    instances give both endpoints of a cover edge value 1 and keep each family's
    neighbourhood value at 1, so every agent is worth the top singleton value.
    """
    if n < 2 or m < 1:
        raise InputError("random instances need n >= 2 and m >= 1")
    if kind not in RANDOM_KINDS:
        raise InputError(f"unknown random kind {kind!r}; choose from {', '.join(RANDOM_KINDS)}")
    cover = cover or kind == "additive-unit"
    n_cover = (n + 1) // 2 if cover else 0
    if m < n_cover:
        raise InputError(f"covering all {n} agents needs at least {n_cover} edges")

    rng = np.random.default_rng(seed)
    pairs = _random_pairs(rng, n, m, simple, cover)
    label = f"random-{kind}-{seed}"

    if kind == "binary":
        rows = [(u, v, int(rng.integers(0, 2)), int(rng.integers(0, 2))) for u, v in pairs]
        return additive_instance(n, _lift_cover(rows, n_cover), label=label)
    if kind == "bivalued12":
        rows = [(u, v, Fraction(int(rng.integers(1, 3)), 2), Fraction(int(rng.integers(1, 3)), 2)) for u, v in pairs]
        return additive_instance(n, _lift_cover(rows, n_cover), label=label)
    if kind == "additive-unit":
        rows = [(u, v, int(rng.integers(1, 11)), int(rng.integers(1, 11))) for u, v in pairs]
        return normalize_additive(additive_instance(n, rows, label=label))

    rows = [(u, v, Fraction(int(rng.integers(0, 5)), 4), Fraction(int(rng.integers(0, 5)), 4)) for u, v in pairs]
    degree = Counter(a for pair in pairs for a in pair)
    families = []
    for agent in range(n):
        choice = int(rng.integers(0, 4))
        if choice == 0:
            families.append(MonotoneFamily.plain())
        elif choice == 1:
            cap = Fraction(int(rng.integers(1, 3)), 2)
            families.append(MonotoneFamily.capped(ONE if cover else cap))
        elif choice == 2:
            threshold = int(rng.integers(1, 4))
            families.append(MonotoneFamily.all_or_nothing(min(threshold, degree[agent]) if cover else threshold))
        else:
            families.append(MonotoneFamily.unit_demand())
    return monotone_instance(n, _lift_cover(rows, n_cover), families, label=label)


def _lift_cover(rows: list, n_cover: int) -> list:
    return [(u, v, ONE, ONE) for u, v, _, _ in rows[:n_cover]] + rows[n_cover:]


GENERATORS = {
    "parallel-pairs": gen_parallel_pairs,
    "threshold-clique": gen_threshold_clique,
    "appendix-path": gen_appendix_path,
    "random": gen_random,
}
