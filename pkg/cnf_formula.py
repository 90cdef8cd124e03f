#!/usr/bin/env python3
"""
CNF formula core
Literals, clauses and formulas with canonical ordering, Horn classification
and DIMACS CNF input/output shared by every other module
"""

import argparse
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, TextIO, Tuple, Union

logger = logging.getLogger(__name__)

# Variables are plain 1-based integers, as in DIMACS
Variable = int


class DimacsParseError(ValueError):
    """Malformed DIMACS input, carrying the 1-based line number"""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True, order=True)
class Literal:
    """A variable with a polarity; ordering puts the negative literal first"""

    variable: Variable
    polarity: bool = True

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError(f"Variable id must be >= 1, got {self.variable}")

    def negate(self) -> "Literal":
        return Literal(self.variable, not self.polarity)

    def __neg__(self) -> "Literal":
        return self.negate()

    @classmethod
    def from_dimacs(cls, value: int) -> "Literal":
        if value == 0:
            raise ValueError("0 terminates a DIMACS clause and is not a literal")
        return cls(abs(value), value > 0)

    def to_dimacs(self) -> int:
        return self.variable if self.polarity else -self.variable

    def __str__(self) -> str:
        return str(self.to_dimacs())


@dataclass(frozen=True)
class Clause:
    """
    Duplicate-free disjunction of literals in canonical order

    Canonical order is ascending variable id with the negative literal first.
    The empty clause denotes contradiction.
    """

    literals: Tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(sorted(set(self.literals))))

    @classmethod
    def from_dimacs(cls, values: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_dimacs(v) for v in values))

    @classmethod
    def from_canonical(cls, literals: Tuple[Literal, ...]) -> "Clause":
        """Wrap literals that are already sorted and duplicate-free"""
        clause = cls.__new__(cls)
        object.__setattr__(clause, "literals", literals)
        return clause

    def to_dimacs(self) -> List[int]:
        return [literal.to_dimacs() for literal in self.literals]

    @property
    def width(self) -> int:
        return len(self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> FrozenSet[Variable]:
        return frozenset(literal.variable for literal in self.literals)

    def positive_literals(self) -> Tuple[Literal, ...]:
        return tuple(literal for literal in self.literals if literal.polarity)

    def negative_literals(self) -> Tuple[Literal, ...]:
        return tuple(literal for literal in self.literals if not literal.polarity)

    def __contains__(self, literal: Literal) -> bool:
        return literal in self.literals

    def __iter__(self):
        return iter(self.literals)

    def __str__(self) -> str:
        return "(" + " ".join(str(literal) for literal in self.literals) + ")"


class ClauseKind(str, Enum):
    POSITIVE_UNIT = "positive-unit"
    DEFINITE = "definite"
    GOAL = "goal"
    NON_HORN = "non-horn"


@dataclass(frozen=True)
class Formula:
    """Ordered clause list plus the declared variable count"""

    clauses: Tuple[Clause, ...] = ()
    variable_count: int = 0
    comments: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "comments", tuple(self.comments))
        if self.variable_count < 0:
            raise ValueError(f"variable_count must be nonnegative, got {self.variable_count}")
        highest = max((v for clause in self.clauses for v in clause.variables()), default=0)
        if highest > self.variable_count:
            raise ValueError(
                f"Variable {highest} exceeds variable_count {self.variable_count}"
            )

    @classmethod
    def from_clauses(cls, clauses: Iterable[Clause], variable_count: Optional[int] = None,
                     comments: Iterable[str] = ()) -> "Formula":
        """Build a formula, taking variable_count from the clauses when not given"""
        clauses = tuple(clauses)
        if variable_count is None:
            variable_count = max((v for c in clauses for v in c.variables()), default=0)
        return cls(clauses, variable_count, tuple(comments))

    @classmethod
    def from_dimacs(cls, clauses: Iterable[Iterable[int]],
                    variable_count: Optional[int] = None) -> "Formula":
        return cls.from_clauses((Clause.from_dimacs(c) for c in clauses), variable_count)

    def to_dimacs(self) -> List[List[int]]:
        return [clause.to_dimacs() for clause in self.clauses]

    @property
    def max_width(self) -> int:
        return max((clause.width for clause in self.clauses), default=0)


def classify(clause: Clause) -> ClauseKind:
    """
    Classify a clause by its positive literals

    Args:
        clause: Clause to classify (the empty clause is a goal)

    Returns:
        ClauseKind of the clause
    """
    positives = len(clause.positive_literals())
    if positives >= 2:
        return ClauseKind.NON_HORN
    if positives == 1:
        return ClauseKind.POSITIVE_UNIT if clause.width == 1 else ClauseKind.DEFINITE
    return ClauseKind.GOAL


def first_non_horn(formula: Formula) -> Optional[int]:
    """Index of the first non-Horn clause, or None for a Horn formula"""
    for index, clause in enumerate(formula.clauses):
        if classify(clause) is ClauseKind.NON_HORN:
            return index
    return None


def is_horn(formula: Formula) -> bool:
    return first_non_horn(formula) is None


def is_tautology(clause: Clause) -> bool:
    """True iff some variable occurs with both polarities"""
    literals = set(clause.literals)
    return any(literal.negate() in literals for literal in clause.literals)


def evaluate_clause(clause: Clause, assignment: Mapping[Variable, bool]) -> bool:
    """Truth value of a clause under a total assignment (missing variables read as False)"""
    return any(assignment.get(lit.variable, False) == lit.polarity for lit in clause.literals)


def evaluate_formula(formula: Formula, assignment: Mapping[Variable, bool]) -> bool:
    return all(evaluate_clause(clause, assignment) for clause in formula.clauses)


def _parse_header(tokens: List[str], line_number: int) -> Tuple[int, int]:
    if len(tokens) != 4 or tokens[1] != "cnf":
        raise DimacsParseError(f"malformed header {' '.join(tokens)!r}, expected 'p cnf <vars> <clauses>'",
                               line_number)
    try:
        variables, clauses = int(tokens[2]), int(tokens[3])
    except ValueError:
        raise DimacsParseError(f"non-integer header counts {' '.join(tokens)!r}", line_number)
    if variables < 0 or clauses < 0:
        raise DimacsParseError("negative header counts", line_number)
    return variables, clauses


def parse_dimacs(text: Union[str, TextIO]) -> Formula:
    """
    Parse DIMACS CNF text

    Comment lines before the header are kept; every clause line must end
    with a terminating 0. A line holding only 0 is the empty clause.

    Args:
        text: DIMACS text or an open text stream

    Returns:
        Formula with clauses in file order

    Raises:
        DimacsParseError: malformed header, out-of-range literal, missing 0
    """
    if not isinstance(text, str):
        text = text.read()

    comments: List[str] = []
    clauses: List[Clause] = []
    header: Optional[Tuple[int, int]] = None

    for line_number, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split()
        if not tokens:
            continue
        if tokens[0] == "c":
            if header is None:
                body = raw.lstrip()[1:]
                comments.append(body[1:] if body.startswith(" ") else body)
            continue
        if tokens[0] == "%":
            # SATLIB benchmark trailer
            break
        if tokens[0] == "p":
            if header is not None:
                raise DimacsParseError("duplicate header", line_number)
            header = _parse_header(tokens, line_number)
            continue
        if header is None:
            raise DimacsParseError("clause before 'p cnf' header", line_number)

        try:
            values = [int(token) for token in tokens]
        except ValueError:
            raise DimacsParseError(f"non-integer literal in {raw.strip()!r}", line_number)
        if values[-1] != 0:
            raise DimacsParseError("clause is missing its terminating 0", line_number)

        current: List[int] = []
        for value in values:
            if value == 0:
                clauses.append(Clause.from_dimacs(current))
                current = []
                continue
            if abs(value) > header[0]:
                raise DimacsParseError(
                    f"literal {value} exceeds declared variable count {header[0]}", line_number
                )
            current.append(value)

    if header is None:
        raise DimacsParseError("missing 'p cnf' header", 1)
    if len(clauses) != header[1]:
        logger.warning(f"Header declares {header[1]} clauses, found {len(clauses)}")

    return Formula(tuple(clauses), header[0], tuple(comments))


def parse_dimacs_file(path: str) -> Formula:
    with open(path, "r", encoding="utf-8") as f:
        return parse_dimacs(f)


def emit_dimacs(formula: Formula) -> str:
    """
    Render a formula as DIMACS CNF text

    Args:
        formula: Formula to render

    Returns:
        DIMACS text; the prefix comment block comes first
    """
    lines = ["c " + comment if comment else "c" for comment in formula.comments]
    lines.append(f"p cnf {formula.variable_count} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join(str(v) for v in clause.to_dimacs() + [0]))
    return "\n".join(lines) + "\n"


def kind_histogram(formula: Formula) -> Dict[str, int]:
    counts = {kind.value: 0 for kind in ClauseKind}
    for clause in formula.clauses:
        counts[classify(clause).value] += 1
    return counts


def main():
    """Main function for command line"""
    parser = argparse.ArgumentParser(description='Classify the clauses of a DIMACS CNF file')
    parser.add_argument('cnf_file', help='Path to DIMACS CNF file')

    args = parser.parse_args()

    try:
        formula = parse_dimacs_file(args.cnf_file)
    except (OSError, DimacsParseError) as e:
        print(f"Error: {e}")
        exit(1)

    print(f"Variables: {formula.variable_count}")
    print(f"Clauses: {len(formula.clauses)}")
    for kind, count in kind_histogram(formula).items():
        print(f"  {kind}: {count}")
    print(f"Horn: {'yes' if is_horn(formula) else 'no'}")


if __name__ == "__main__":
    main()
