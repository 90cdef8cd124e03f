#!/usr/bin/env python3
"""
RCNF transform
Meta-encodes the resolution closure of a formula as a Horn formula whose
variables stand for clauses, and reduces Horn formulas to RCNF through
width-3 splitting and fixed per-clause gadget templates
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from cnf_formula import Clause, ClauseKind, Formula, Literal, classify
from resolution_engine import Budget, NotHornError, SaturationResult, saturate

logger = logging.getLogger(__name__)


class GadgetError(ValueError):
    """Clause has no gadget template (non-Horn, empty or wider than 3)"""


class GadgetTemplate(str, Enum):
    C_R = "cR"
    C_PQ = "cPq"
    C_IJK = "cIjk"

    @property
    def arity(self) -> int:
        return {"cR": 1, "cPq": 2, "cIjk": 3}[self.value]

    @classmethod
    def for_clause(cls, clause: Clause) -> "GadgetTemplate":
        if classify(clause) is ClauseKind.NON_HORN:
            raise GadgetError(f"{clause} is not Horn")
        for template in cls:
            if template.arity == clause.width:
                return template
        raise GadgetError(f"no gadget template for width {clause.width} clause {clause}")


class MetaVariableTable:
    """
    Meta variable ids for object-level clauses, assigned in first-use order

    The empty clause never gets a meta variable.
    """

    def __init__(self):
        self._ids: Dict[Clause, int] = {}
        self._clauses: List[Clause] = []

    def meta(self, clause: Clause) -> int:
        if clause.is_empty:
            raise ValueError("the empty clause has no meta variable")
        meta_id = self._ids.get(clause)
        if meta_id is None:
            self._clauses.append(clause)
            meta_id = len(self._clauses)
            self._ids[clause] = meta_id
        return meta_id

    def literal(self, clause: Clause, polarity: bool = True) -> Literal:
        return Literal(self.meta(clause), polarity)

    def clause_of(self, meta_id: int) -> Clause:
        return self._clauses[meta_id - 1]

    def mapping(self) -> Dict[Clause, int]:
        return dict(self._ids)

    def __len__(self) -> int:
        return len(self._clauses)

    def __contains__(self, clause: Clause) -> bool:
        return clause in self._ids

    def sidecar(self) -> Dict[str, Any]:
        return {
            "meta_vars": [
                {"id": index, "clause": clause.to_dimacs()}
                for index, clause in enumerate(self._clauses, 1)
            ]
        }


@dataclass(frozen=True)
class RcnfEncoding:
    """RCNF meta formula plus the bookkeeping that produced it"""

    meta_variable_of: Dict[Clause, int]
    unit_assertions: Tuple[Clause, ...]
    resolution_clauses: Tuple[Clause, ...]
    formula: Formula
    saturation: SaturationResult
    table: MetaVariableTable

    @property
    def truncated(self) -> bool:
        """Truncated encodings are not authoritative for satisfiability"""
        return self.saturation.truncated

    def sidecar(self) -> Dict[str, Any]:
        data = self.table.sidecar()
        data["truncated"] = self.truncated
        return data


def rcnf_of(formula: Formula, budget: Optional[Budget] = None) -> RcnfEncoding:
    """
    Build the RCNF meta-encoding of a formula's resolution closure

    Each non-empty derived clause becomes a meta variable (in derived order),
    each input clause a unit assertion and each resolution step a clause
    (-a -b r), or the goal (-a -b) when the consequent is empty.

    Args:
        formula: Non-empty formula
        budget: Saturation limits

    Returns:
        RcnfEncoding; its formula is always Horn
    """
    result = saturate(formula, budget)

    table = MetaVariableTable()
    for clause in result.derived:
        if not clause.is_empty:
            table.meta(clause)

    units = []
    for index in result.input_indices:
        clause = result.derived[index]
        # An empty input clause stays the empty meta clause
        units.append(Clause() if clause.is_empty else Clause((table.literal(clause),)))

    resolution_clauses = []
    for step in result.steps:
        literals = [
            table.literal(result.derived[step.positive_antecedent], False),
            table.literal(result.derived[step.negative_antecedent], False),
        ]
        consequent = result.derived[step.consequent]
        if not consequent.is_empty:
            literals.append(table.literal(consequent))
        resolution_clauses.append(Clause(tuple(literals)))

    meta_formula = Formula(tuple(units) + tuple(resolution_clauses), len(table))
    logger.info(f"RCNF: {len(table)} meta variables, {len(units)} units, "
                f"{len(resolution_clauses)} resolution clauses"
                + (" (truncated)" if result.truncated else ""))

    return RcnfEncoding(
        meta_variable_of=table.mapping(),
        unit_assertions=tuple(units),
        resolution_clauses=tuple(resolution_clauses),
        formula=meta_formula,
        saturation=result,
        table=table,
    )


def _roles(clause: Clause) -> Tuple[Literal, Tuple[Literal, ...]]:
    """Head literal (the positive one, else the first negative) and the remaining literals"""
    positives = clause.positive_literals()
    head = positives[0] if positives else clause.literals[0]
    return head, tuple(literal for literal in clause.literals if literal != head)


class Horn3Splitter:
    """
    Splits wide Horn clauses into width-3 chains in a single pass

    State is the next fresh variable id; each clause is handled with a
    pointer to its current link variable.
    """

    def __init__(self, variable_count: int):
        self.next_fresh = variable_count + 1

    @property
    def variable_count(self) -> int:
        return self.next_fresh - 1

    def _fresh(self) -> int:
        variable = self.next_fresh
        self.next_fresh += 1
        return variable

    def split(self, clause: Clause) -> Iterator[Clause]:
        if clause.width <= 3:
            yield clause
            return

        head, tail = _roles(clause)
        link = self._fresh()
        yield Clause((head, tail[0], Literal(link, False)))
        for literal in tail[1:-1]:
            successor = self._fresh()
            yield Clause((Literal(link, True), literal, Literal(successor, False)))
            link = successor
        yield Clause((Literal(link, True), tail[-1]))


def iter_split_horn3(clauses: Iterable[Clause], variable_count: int) -> Iterator[Clause]:
    """
    Stream the width-3 rewrite of Horn clauses

    Raises:
        NotHornError: when the stream reaches a non-Horn clause
    """
    splitter = Horn3Splitter(variable_count)
    for index, clause in enumerate(clauses):
        if classify(clause) is ClauseKind.NON_HORN:
            raise NotHornError(index, clause)
        yield from splitter.split(clause)


def split_horn3(formula: Formula) -> Formula:
    """
    Rewrite a Horn formula so every clause has width at most 3

    A width-w clause (I -j -k -l ...) becomes the chain
    (I -j -f1) (f1 -k -f2) ... (f(w-2) -last) over w-2 fresh variables
    numbered above formula.variable_count.

    Raises:
        NotHornError: on the first non-Horn clause
    """
    clauses = tuple(iter_split_horn3(formula.clauses, formula.variable_count))
    fresh = sum(clause.width - 2 for clause in formula.clauses if clause.width > 3)
    if fresh:
        logger.debug(f"split_horn3 introduced {fresh} fresh variables")
    return Formula(clauses, formula.variable_count + fresh, formula.comments)


def _unit(literal: Literal) -> Clause:
    return Clause((literal,))


def _template_clauses(clause: Clause) -> List[List[Tuple[Clause, bool]]]:
    """Gadget clauses as (object sub-clause, polarity) lists in written order"""
    template = GadgetTemplate.for_clause(clause)
    head, rest = _roles(clause)

    if template is GadgetTemplate.C_R:
        return [
            [(clause, True)],
            [(clause, False), (_unit(head.negate()), False)],
        ]

    if template is GadgetTemplate.C_PQ:
        q = rest[0].negate()
        return [
            [(clause, True)],
            [(_unit(head), True), (clause, False), (_unit(q), False)],
            [(_unit(head), False), (_unit(head.negate()), False)],
        ]

    j_literal, k_literal = rest
    j, k = j_literal.negate(), k_literal.negate()
    without_j = Clause((head, k_literal))
    without_k = Clause((head, j_literal))
    return [
        [(clause, True)],
        [(without_j, True), (clause, False), (_unit(j), False)],
        [(without_k, True), (clause, False), (_unit(k), False)],
        [(_unit(head), True), (without_k, False), (_unit(j), False)],
        [(_unit(head), True), (without_j, False), (_unit(k), False)],
        [(_unit(head), False), (_unit(head.negate()), False)],
    ]


def gadget_rcnf(clause: Clause, table: Optional[MetaVariableTable] = None) -> Formula:
    """
    Instantiate the RCNF gadget of a Horn clause of width 1 to 3

    Meta variables come from table, so sub-clauses shared between gadgets
    share their meta variable. Widths 1, 2 and 3 give 2, 3 and 6 clauses.

    Args:
        clause: Horn clause of width 1..3
        table: Shared meta variable table; a fresh one when omitted

    Returns:
        Gadget formula over the table's meta variables

    Raises:
        GadgetError: non-Horn, empty or too wide clause
    """
    table = table if table is not None else MetaVariableTable()
    meta_clauses = [
        Clause(tuple(table.literal(sub, polarity) for sub, polarity in parts))
        for parts in _template_clauses(clause)
    ]
    return Formula(tuple(meta_clauses), len(table))


def horn_to_rcnf(formula: Formula, table: Optional[MetaVariableTable] = None) -> Formula:
    """
    Reduce a Horn formula to RCNF: split to width 3, then gadget every clause

    Raises:
        NotHornError: on the first non-Horn clause
    """
    table = table if table is not None else MetaVariableTable()
    split = split_horn3(formula)

    meta_clauses: List[Clause] = []
    for clause in split.clauses:
        if clause.is_empty:
            meta_clauses.append(Clause())
            continue
        meta_clauses.extend(gadget_rcnf(clause, table).clauses)

    logger.info(f"Horn to RCNF: {len(formula.clauses)} clauses -> "
                f"{len(split.clauses)} split -> {len(meta_clauses)} meta clauses")
    return Formula(tuple(meta_clauses), len(table))


def gadget_clause_counts(clauses: Sequence[Clause]) -> Dict[int, int]:
    """Meta clause count per input width, each clause gadgeted on its own table"""
    return {clause.width: len(gadget_rcnf(clause).clauses) for clause in clauses}
