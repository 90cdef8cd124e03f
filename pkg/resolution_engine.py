#!/usr/bin/env python3
"""
Resolution engine
Single-variable resolution, level saturation with budgets, unit propagation
for Horn formulas and a backtracking satisfiability oracle
"""

import bisect
import logging
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Tuple, Union

from cnf_formula import (
    Clause,
    ClauseKind,
    Formula,
    Literal,
    Variable,
    classify,
    evaluate_clause,
    evaluate_formula,
    is_tautology,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_CLAUSES = 10 ** 6
DEFAULT_MAX_ROUNDS = 64
DEFAULT_ORACLE_LIMIT = 24
ORACLE_LIMIT_ENV = "RESCNF_ORACLE_LIMIT"


class NotHornError(ValueError):
    """A Horn-only operation met a clause with two or more positive literals"""

    def __init__(self, clause_index: int, clause: Clause):
        super().__init__(f"clause {clause_index} {clause} is not Horn "
                         f"({len(clause.positive_literals())} positive literals)")
        self.clause_index = clause_index
        self.clause = clause


class OracleLimitError(ValueError):
    """Formula has more variables than the brute-force oracle accepts"""

    def __init__(self, variable_count: int, limit: int):
        super().__init__(f"{variable_count} variables exceed the brute-force limit of {limit} "
                         f"(set {ORACLE_LIMIT_ENV} to raise it)")
        self.variable_count = variable_count
        self.limit = limit


def oracle_limit() -> int:
    """Brute-force variable cap, overridable through RESCNF_ORACLE_LIMIT"""
    raw = os.getenv(ORACLE_LIMIT_ENV)
    if raw is None:
        return DEFAULT_ORACLE_LIMIT
    try:
        value = int(raw)
        if value < 1:
            raise ValueError(raw)
        return value
    except ValueError:
        logger.warning(f"Ignoring invalid {ORACLE_LIMIT_ENV}={raw!r}, using {DEFAULT_ORACLE_LIMIT}")
        return DEFAULT_ORACLE_LIMIT


@dataclass(frozen=True)
class Budget:
    """Saturation limits; max_clause_width None means unlimited"""

    max_clauses: int = DEFAULT_MAX_CLAUSES
    max_rounds: int = DEFAULT_MAX_ROUNDS
    max_clause_width: Optional[int] = None

    def __post_init__(self):
        for name in ("max_clauses", "max_rounds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.max_clause_width is not None and self.max_clause_width < 1:
            raise ValueError(f"max_clause_width must be >= 1, got {self.max_clause_width}")


class ResolutionStep(NamedTuple):
    """Indices into SaturationResult.derived"""

    positive_antecedent: int
    negative_antecedent: int
    joint_variable: Variable
    consequent: int

    def to_json(self) -> Dict[str, int]:
        return {
            "pos": self.positive_antecedent,
            "neg": self.negative_antecedent,
            "var": self.joint_variable,
            "out": self.consequent,
        }


class RejectionReason(str, Enum):
    NO_JOINT = "no-joint"
    TAUTOLOGY = "tautology"


@dataclass(frozen=True)
class Rejection:
    reason: RejectionReason
    joint: Tuple[Variable, ...] = ()


@dataclass
class Assignment:
    """Partial assignment; variables absent from values are unassigned"""

    values: Dict[Variable, bool] = field(default_factory=dict)
    variable_count: int = 0

    def value(self, variable: Variable) -> Optional[bool]:
        return self.values.get(variable)

    def is_total(self) -> bool:
        return all(v in self.values for v in range(1, self.variable_count + 1))

    def completed(self, default: bool = False) -> "Assignment":
        """Total copy with unassigned variables set to default"""
        values = {v: self.values.get(v, default) for v in range(1, self.variable_count + 1)}
        return Assignment(values, self.variable_count)

    def satisfies(self, formula: Formula) -> bool:
        return evaluate_formula(formula, self.values)

    def to_dimacs(self) -> List[int]:
        return [v if self.values[v] else -v for v in sorted(self.values)]


@dataclass(frozen=True)
class Conflict:
    """Unit propagation falsified clause_index under assignment"""

    clause_index: int
    assignment: Assignment


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    model: Optional[Assignment] = None

    @property
    def verdict(self) -> str:
        return "SAT" if self.satisfiable else "UNSAT"


@dataclass(frozen=True)
class SaturationResult:
    """
    Closure of a formula under single-variable resolution

    derived holds the distinct input clauses first (input_count of them),
    then resolvents in discovery order. input_indices maps every input
    clause, duplicates included, to its slot in derived.
    """

    derived: Tuple[Clause, ...]
    steps: Tuple[ResolutionStep, ...]
    empty_clause_found: bool
    rounds: int
    per_round_new: Tuple[int, ...]
    truncated: bool
    input_count: int
    input_indices: Tuple[int, ...]

    @property
    def consequents(self) -> Tuple[Clause, ...]:
        return self.derived[self.input_count:]

    def to_json(self) -> Dict[str, Any]:
        return {
            "derived": [clause.to_dimacs() for clause in self.derived],
            "steps": [step.to_json() for step in self.steps],
            "input_count": self.input_count,
            "rounds": self.rounds,
            "empty_clause_found": self.empty_clause_found,
            "truncated": self.truncated,
            "per_round_new": list(self.per_round_new),
        }


def joint_variables(a: Clause, b: Clause) -> Tuple[Variable, ...]:
    """Variables occurring with one polarity in a and the opposite one in b, ascending"""
    b_literals = set(b.literals)
    return tuple(sorted({lit.variable for lit in a.literals if lit.negate() in b_literals}))


def _resolve_oriented(a: Clause, b: Clause) -> Union[Tuple[bool, Variable, Clause], Rejection]:
    """Resolve a with b; on success report whether a is the positive antecedent"""
    joint = joint_variables(a, b)
    if not joint:
        return Rejection(RejectionReason.NO_JOINT, joint)
    if len(joint) > 1 or is_tautology(a) or is_tautology(b):
        return Rejection(RejectionReason.TAUTOLOGY, joint)

    pivot = joint[0]
    a_positive = Literal(pivot, True) in a
    positive, negative = (a, b) if a_positive else (b, a)
    consequent = Clause(
        tuple(lit for lit in positive.literals if lit.variable != pivot)
        + tuple(lit for lit in negative.literals if lit.variable != pivot)
    )
    return a_positive, pivot, consequent


def resolve(a: Clause, b: Clause) -> Union[Clause, Rejection]:
    """
    Resolve two clauses on their unique joint variable

    Pairs with two or more joint variables only yield tautologies and are
    rejected, as are pairs where an antecedent is itself tautological.

    Args:
        a: First antecedent
        b: Second antecedent

    Returns:
        The consequent clause, or a Rejection with its reason
    """
    outcome = _resolve_oriented(a, b)
    if isinstance(outcome, Rejection):
        return outcome
    return outcome[2]


def _canonical_rank(value: int) -> int:
    """Sort key for DIMACS literals matching the Literal order"""
    return 2 * abs(value) + (value > 0)


def saturate(formula: Formula, budget: Optional[Budget] = None,
             record_steps: bool = True) -> SaturationResult:
    """
    Close a formula under resolution, one level per round

    Round r resolves every clause discovered in round r-1 against every
    clause with a smaller index. Pairs are visited by ascending later index,
    then ascending earlier index, which fixes the discovery order.

    Args:
        formula: Formula with at least one clause
        budget: Limits; defaults to Budget()
        record_steps: Keep the ResolutionStep list; growth measurements
            that only need counts can switch it off

    Returns:
        SaturationResult, truncated when a limit was hit
    """
    if not formula.clauses:
        raise ValueError("saturate needs a formula with at least one clause")
    budget = budget or Budget()

    derived: List[Clause] = []
    # DIMACS literals of derived[i], ascending ints; also the dedup key
    keys: List[Tuple[int, ...]] = []
    index_of: Dict[Tuple[int, ...], int] = {}
    # literal -> ascending indices of derived clauses containing it
    occurrences: Dict[int, List[int]] = defaultdict(list)
    literal_cache: Dict[int, Literal] = {}
    # only inputs can be tautological: a resolvent of a pair with one clash never is
    tautological = set()

    def add(clause: Clause, key: Tuple[int, ...]) -> int:
        index = len(derived)
        derived.append(clause)
        keys.append(key)
        index_of[key] = index
        for value in key:
            occurrences[value].append(index)
        return index

    def build_clause(key: Tuple[int, ...]) -> Clause:
        literals = []
        for value in sorted(key, key=_canonical_rank):
            literal = literal_cache.get(value)
            if literal is None:
                literal = literal_cache[value] = Literal.from_dimacs(value)
            literals.append(literal)
        return Clause.from_canonical(tuple(literals))

    input_indices = []
    for clause in formula.clauses:
        key = tuple(sorted(clause.to_dimacs()))
        index = index_of.get(key)
        if index is None:
            index = add(clause, key)
            if is_tautology(clause):
                tautological.add(index)
        input_indices.append(index)
    input_count = len(derived)

    steps: List[ResolutionStep] = []
    per_round_new: List[int] = []
    rounds = 0
    truncated = False
    width_limited = False
    max_width = budget.max_clause_width
    found = () in index_of
    start, end = 0, input_count

    while not found and not truncated and start < end:
        if rounds >= budget.max_rounds:
            truncated = True
            break
        rounds += 1
        added = 0

        for j in range(start, end):
            if j in tautological:
                continue
            key_j = keys[j]
            # complementary literals each earlier clause shares with clause j
            hits = Counter()
            for value in key_j:
                bucket = occurrences.get(-value)
                if bucket:
                    hits.update(bucket[:bisect.bisect_left(bucket, j)])

            for i in sorted(i for i, count in hits.items() if count == 1):
                if i in tautological:
                    continue
                key_i = keys[i]
                pivot = next(value for value in key_j if -value in key_i)
                merged = set(key_i)
                merged.update(key_j)
                merged.discard(pivot)
                merged.discard(-pivot)
                if max_width is not None and len(merged) > max_width:
                    width_limited = True
                    continue

                key = tuple(sorted(merged))
                out = index_of.get(key)
                if out is None:
                    if len(derived) >= budget.max_clauses:
                        truncated = True
                        break
                    out = add(build_clause(key), key)
                    added += 1
                if record_steps:
                    pos, neg = (j, i) if pivot > 0 else (i, j)
                    steps.append(ResolutionStep(pos, neg, abs(pivot), out))
                if not key:
                    found = True
                    break
            if found or truncated:
                break

        per_round_new.append(added)
        logger.debug(f"Round {rounds}: {added} new clauses, {len(derived)} total")
        start, end = end, len(derived)

    if truncated:
        logger.info(f"Saturation truncated after {rounds} rounds at {len(derived)} clauses")
    if width_limited:
        logger.info(f"Resolvents wider than {budget.max_clause_width} literals were dropped")

    return SaturationResult(
        derived=tuple(derived),
        steps=tuple(steps),
        empty_clause_found=found,
        rounds=rounds,
        per_round_new=tuple(per_round_new),
        truncated=truncated or width_limited,
        input_count=input_count,
        input_indices=tuple(input_indices),
    )


def _unit_status(clause: Clause, values: Dict[Variable, bool]) -> Tuple[str, Optional[Literal]]:
    unassigned = []
    for literal in clause.literals:
        value = values.get(literal.variable)
        if value is None:
            unassigned.append(literal)
        elif value == literal.polarity:
            return "satisfied", None
    if not unassigned:
        return "falsified", None
    if len(unassigned) == 1:
        return "unit", unassigned[0]
    return "open", None


def unit_propagate(formula: Formula) -> Union[Assignment, Conflict]:
    """
    Assert unit literals to a fixpoint

    Clauses are scanned in order and the scan restarts after every
    assertion.

    Args:
        formula: Any formula

    Returns:
        The partial Assignment at the fixpoint, or the first Conflict
    """
    values: Dict[Variable, bool] = {}
    while True:
        asserted = False
        for index, clause in enumerate(formula.clauses):
            status, unit = _unit_status(clause, values)
            if status == "falsified":
                return Conflict(index, Assignment(dict(values), formula.variable_count))
            if status == "unit":
                values[unit.variable] = unit.polarity
                asserted = True
                break
        if not asserted:
            return Assignment(values, formula.variable_count)


def horn_sat(formula: Formula) -> SatResult:
    """
    Decide a Horn formula by unit propagation

    Raises:
        NotHornError: naming the first clause with two positive literals
    """
    for index, clause in enumerate(formula.clauses):
        if classify(clause) is ClauseKind.NON_HORN:
            raise NotHornError(index, clause)

    outcome = unit_propagate(formula)
    if isinstance(outcome, Conflict):
        logger.debug(f"Unit propagation conflict at clause {outcome.clause_index}")
        return SatResult(False)

    # Every open clause keeps an unassigned negative literal, so all-false completes a model
    model = outcome.completed(False)
    if not model.satisfies(formula):
        raise RuntimeError("Horn minimal model failed verification")
    return SatResult(True, model)


def _force_literal(clauses: List[List[int]], literal: int) -> List[List[int]]:
    return [[l for l in clause if l != -literal] for clause in clauses if literal not in clause]


def _search(clauses: List[List[int]], trail: Dict[int, bool]) -> Optional[Dict[int, bool]]:
    while True:
        if not clauses:
            return trail
        if any(not clause for clause in clauses):
            return None
        unit = next((clause[0] for clause in clauses if len(clause) == 1), None)
        if unit is None:
            break
        trail = {**trail, abs(unit): unit > 0}
        clauses = _force_literal(clauses, unit)

    variable = min(abs(l) for clause in clauses for l in clause)
    for literal in (variable, -variable):
        model = _search(_force_literal(clauses, literal), {**trail, variable: literal > 0})
        if model is not None:
            return model
    return None


def brute_force_sat(formula: Formula, limit: Optional[int] = None) -> SatResult:
    """
    Decide satisfiability by exhaustive backtracking

    Args:
        formula: Formula to decide
        limit: Variable cap; defaults to oracle_limit()

    Returns:
        SatResult with a verified total model when satisfiable

    Raises:
        OracleLimitError: variable_count above the cap
    """
    limit = oracle_limit() if limit is None else limit
    if formula.variable_count > limit:
        raise OracleLimitError(formula.variable_count, limit)

    clauses = [clause.to_dimacs() for clause in formula.clauses if not is_tautology(clause)]
    found = _search(clauses, {})
    if found is None:
        return SatResult(False)

    model = Assignment(found, formula.variable_count).completed(False)
    for index, clause in enumerate(formula.clauses):
        if not evaluate_clause(clause, model.values):
            raise RuntimeError(f"Oracle model falsifies clause {index} {clause}")
    return SatResult(True, model)


@dataclass(frozen=True)
class ResolutionGroup:
    """All steps of a saturation sharing one joint variable"""

    variable: Variable
    positive_antecedents: FrozenSet[int]
    negative_antecedents: FrozenSet[int]
    consequents: FrozenSet[int]

    @property
    def size(self) -> int:
        return len(self.consequents)


def group_by_joint_variable(result: SaturationResult) -> Dict[Variable, ResolutionGroup]:
    """Group saturation steps by joint variable, keys ascending"""
    buckets: Dict[Variable, List[ResolutionStep]] = defaultdict(list)
    for step in result.steps:
        buckets[step.joint_variable].append(step)
    return {
        variable: ResolutionGroup(
            variable,
            frozenset(s.positive_antecedent for s in steps),
            frozenset(s.negative_antecedent for s in steps),
            frozenset(s.consequent for s in steps),
        )
        for variable, steps in sorted(buckets.items())
    }
