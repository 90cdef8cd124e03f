#!/usr/bin/env python3
"""
Seeded random formulas for the test suites
"""

import itertools
import random
from typing import Iterator, Sequence

from cnf_formula import Clause, Formula, Literal, evaluate_clause


def random_clause(rng: random.Random, variable_count: int, width: int) -> Clause:
    """Clause over width distinct variables with random polarities"""
    variables = rng.sample(range(1, variable_count + 1), min(width, variable_count))
    return Clause(tuple(Literal(v, rng.random() < 0.5) for v in variables))


def random_formula(rng: random.Random, max_variables: int, max_clauses: int,
                   widths: Sequence[int] = (1, 2, 2, 3, 3, 4)) -> Formula:
    variable_count = rng.randint(1, max_variables)
    clauses = [random_clause(rng, variable_count, rng.choice(widths))
               for _ in range(rng.randint(1, max_clauses))]
    return Formula(tuple(clauses), variable_count)


def random_horn_clause(rng: random.Random, variable_count: int, width: int) -> Clause:
    """Clause with at most one positive literal"""
    variables = rng.sample(range(1, variable_count + 1), min(width, variable_count))
    head = rng.random() < 0.6
    return Clause(tuple(Literal(v, head and index == 0) for index, v in enumerate(variables)))


def random_horn_formula(rng: random.Random, max_variables: int, max_clauses: int,
                        widths: Sequence[int] = (1, 1, 2, 3, 4, 5, 6)) -> Formula:
    variable_count = rng.randint(1, max_variables)
    clauses = [random_horn_clause(rng, variable_count, rng.choice(widths))
               for _ in range(rng.randint(1, max_clauses))]
    return Formula(tuple(clauses), variable_count)


def assignments(variables: Sequence[int]) -> Iterator[dict]:
    """Every total assignment of the given variables"""
    variables = sorted(variables)
    for bits in itertools.product([False, True], repeat=len(variables)):
        yield dict(zip(variables, bits))


def entails(premises: Sequence[Clause], conclusion: Clause) -> bool:
    """Every assignment satisfying all premises satisfies conclusion"""
    variables = set(conclusion.variables())
    for clause in premises:
        variables |= clause.variables()
    return all(
        evaluate_clause(conclusion, assignment)
        for assignment in assignments(variables)
        if all(evaluate_clause(clause, assignment) for clause in premises)
    )


# K4 with an S3 gadget on every node, as written by the generator
K4_ALL_S3 = (
    "c ccnf k4 kinds all-s3 girth 3 k 1 c0 2\n"
    "p cnf 6 16\n"
    "-1 -2 0\n-2 -3 0\n-1 -3 0\n1 2 3 0\n"
    "-1 -4 0\n-4 -5 0\n-1 -5 0\n1 4 5 0\n"
    "-2 -4 0\n-4 -6 0\n-2 -6 0\n2 4 6 0\n"
    "-3 -5 0\n-5 -6 0\n-3 -6 0\n3 5 6 0\n"
)

# Petersen all-S4 growth row under the default budget of 10**6 clauses:
# 120 + 3840 + 996000 consequents, truncated in round three
PETERSEN_ROW = "petersen,2,2,all-s4,,40,999960,24999.0,3,true,1.6\n"

# The same instance under a 200 clause budget
PETERSEN_SMALL_BUDGET_ROW = "petersen,2,2,all-s4,,40,160,4.0,2,true,1.6\n"
