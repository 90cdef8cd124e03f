#!/usr/bin/env python3
"""
Growth lab
Measures how many consequents resolution saturation derives from CCNF
instances, traces the frontier along chains of S4 gadgets and compares
against the closed-form ratio 2^(k*c0) / (1 + 3(2^k - 1))
"""

import argparse
import csv
import io
import json
import logging
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from cnf_formula import Clause, Formula, Literal, parse_dimacs_file
from resolution_engine import (
    Budget,
    Rejection,
    SaturationResult,
    group_by_joint_variable,
    joint_variables,
    resolve,
    saturate,
)
from scnf_generator import ALL_POSITIVE, CcnfInstance, Roles, s4cnf

logger = logging.getLogger(__name__)

RATIO_PRECISION = 50
RATIO_DIGITS = 6
CCNF_COMMENT = re.compile(
    r"^ccnf (?P<graph>\S+) kinds (?P<kinds>\S+) girth \d+ k (?P<k>\d+) c0 (?P<c0>\S+)(?: seed (?P<seed>-?\d+))?$"
)


class ChainError(ValueError):
    """S4 chain without a single shared link variable between neighbours"""


def moore_size(k: int) -> int:
    """Node count 1 + 3(2^k - 1) of a cubic Moore graph of girth 2k+1"""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1 + 3 * (2 ** k - 1)


def closed_form_ratio(k: int, c0: Union[int, str, Fraction]) -> Union[Fraction, Decimal]:
    """
    2^(k*c0) / moore_size(k)

    Exact as a Fraction when k*c0 is an integer, otherwise a Decimal
    carrying RATIO_PRECISION significant digits.
    """
    exponent = k * Fraction(c0)
    denominator = moore_size(k)
    if exponent.denominator == 1:
        return Fraction(2 ** exponent.numerator, denominator)
    with localcontext() as ctx:
        ctx.prec = RATIO_PRECISION
        power = Decimal(2) ** (Decimal(exponent.numerator) / Decimal(exponent.denominator))
        return power / denominator


def _ratio_value(value: Optional[Union[Fraction, Decimal]]) -> Optional[float]:
    return None if value is None else round(float(value), RATIO_DIGITS)


@dataclass(frozen=True)
class GrowthDescriptor:
    """Where a measured formula came from; ad hoc formulas leave k and c0 empty"""

    instance: str = "ad-hoc"
    k: Optional[int] = None
    c0: Optional[Fraction] = None
    kinds: str = ""
    seed: Optional[int] = None

    @classmethod
    def from_sidecar(cls, data: Dict[str, Any], fallback_name: str = "ad-hoc") -> "GrowthDescriptor":
        generation = data.get("generation", {})
        kinds = generation.get("kinds", "")
        if not isinstance(kinds, str):
            kinds = "mixed"
        graph = generation.get("graph")
        seed = generation.get("polarity_seed")
        if isinstance(graph, dict) and seed is None:
            seed = graph.get("seed")
        c0 = data.get("c0")
        return cls(
            instance=data.get("graph", fallback_name),
            k=data.get("k"),
            c0=None if c0 is None else Fraction(str(c0)),
            kinds=kinds,
            seed=seed,
        )

    @classmethod
    def from_instance(cls, instance: CcnfInstance) -> "GrowthDescriptor":
        return cls.from_sidecar(instance.sidecar())

    @classmethod
    def from_comments(cls, comments: Sequence[str]) -> "GrowthDescriptor":
        """Read the generator's DIMACS comment line; ad hoc when there is none"""
        for comment in comments:
            match = CCNF_COMMENT.match(comment.strip())
            if match:
                return cls(
                    instance=match.group("graph"),
                    k=int(match.group("k")),
                    c0=Fraction(match.group("c0")),
                    kinds=match.group("kinds"),
                    seed=None if match.group("seed") is None else int(match.group("seed")),
                )
        return cls()


@dataclass(frozen=True)
class GrowthReport:
    """Saturation growth of one formula"""

    CSV_FIELDS = ("instance", "k", "c0", "kinds", "seed", "input_size", "consequents",
                  "ratio", "rounds", "truncated", "closed_form_ratio")

    descriptor: GrowthDescriptor
    input_size: int
    per_round_new: Tuple[int, ...]
    rounds: int
    truncated: bool
    empty_clause_found: bool

    @property
    def total_consequents(self) -> int:
        return sum(self.per_round_new)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.total_consequents, self.input_size)

    @property
    def closed_form_ratio(self) -> Optional[Union[Fraction, Decimal]]:
        if self.descriptor.k is None or self.descriptor.c0 is None:
            return None
        return closed_form_ratio(self.descriptor.k, self.descriptor.c0)

    def to_json(self) -> Dict[str, Any]:
        d = self.descriptor
        return {
            "instance": d.instance,
            "k": d.k,
            "c0": None if d.c0 is None else str(d.c0),
            "kinds": d.kinds,
            "seed": d.seed,
            "input_size": self.input_size,
            "per_round_new": list(self.per_round_new),
            "total_consequents": self.total_consequents,
            "ratio": _ratio_value(self.ratio),
            "rounds": self.rounds,
            "truncated": self.truncated,
            "empty_clause_found": self.empty_clause_found,
            "closed_form_ratio": _ratio_value(self.closed_form_ratio),
        }

    def csv_values(self) -> List[Any]:
        data = self.to_json()
        data["consequents"] = data["total_consequents"]
        values = []
        for name in self.CSV_FIELDS:
            value = data[name]
            if value is None:
                value = ""
            elif isinstance(value, bool):
                value = "true" if value else "false"
            values.append(value)
        return values

    def to_csv_row(self, header: bool = False) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if header:
            writer.writerow(self.CSV_FIELDS)
        writer.writerow(self.csv_values())
        return buffer.getvalue()


def measure_growth(formula: Formula, budget: Optional[Budget] = None,
                   descriptor: Optional[GrowthDescriptor] = None) -> GrowthReport:
    """
    Saturate a formula and report how many distinct consequents appeared

    Args:
        formula: Non-empty formula, usually a CCNF instance
        budget: Saturation limits
        descriptor: Instance description; ad hoc when omitted

    Returns:
        GrowthReport; ratio is consequents over the raw clause count
    """
    result = saturate(formula, budget, record_steps=False)
    report = GrowthReport(
        descriptor=descriptor or GrowthDescriptor(),
        input_size=len(formula.clauses),
        per_round_new=result.per_round_new,
        rounds=result.rounds,
        truncated=result.truncated,
        empty_clause_found=result.empty_clause_found,
    )
    logger.info(f"Growth of {report.descriptor.instance}: {report.total_consequents} consequents "
                f"from {report.input_size} clauses, ratio {float(report.ratio):.4f}"
                + (" (truncated)" if report.truncated else ""))
    return report


def grouped_growth(result: SaturationResult) -> Dict[int, int]:
    """Distinct consequents per joint variable, keys ascending"""
    return {variable: group.size for variable, group in group_by_joint_variable(result).items()}


@dataclass(frozen=True)
class DoublingTrace:
    """Frontier size before the chain and after each gadget"""

    chain_length: int
    frontier_sizes: Tuple[int, ...]

    @property
    def growth_factors(self) -> Tuple[Fraction, ...]:
        sizes = self.frontier_sizes
        return tuple(Fraction(b, a) for a, b in zip(sizes, sizes[1:]) if a)

    def to_json(self) -> Dict[str, Any]:
        return {"chain_length": self.chain_length, "frontier_sizes": list(self.frontier_sizes)}


def s4_chain(length: int, roles: Roles = ALL_POSITIVE) -> List[Formula]:
    """S4 gadgets where gadget j covers variables 2j+1, 2j+2, 2j+3; neighbours share one variable"""
    if length < 0:
        raise ValueError(f"Chain length must be >= 0, got {length}")
    return [s4cnf((2 * j + 1, 2 * j + 2, 2 * j + 3), roles) for j in range(length)]


def _variables(formula: Formula) -> frozenset:
    return frozenset(v for clause in formula.clauses for v in clause.variables())


def _chain_links(chain: Sequence[Formula], seed: Clause) -> List[int]:
    scopes = [_variables(gadget) for gadget in chain]
    entry = seed.variables() & scopes[0]
    if len(entry) != 1:
        raise ChainError(f"Seed {seed} must share exactly one variable with the first gadget, "
                         f"shares {sorted(entry)}")
    links = [next(iter(entry))]
    for position, (previous, current) in enumerate(zip(scopes, scopes[1:]), 1):
        shared = previous & current
        if len(shared) != 1:
            raise ChainError(f"Gadgets {position - 1} and {position} share {sorted(shared)}, "
                             "expected exactly one link variable")
        links.append(next(iter(shared)))
    return links


def doubling_check(chain: Sequence[Formula], seed: Clause) -> DoublingTrace:
    """
    Push a resolution wave along an S4 chain

    The frontier starts as {seed}. At each gadget it is replaced by every
    distinct resolvent of a frontier clause with a gadget clause whose only
    joint variable is the gadget's entry link.

    Args:
        chain: Gadgets where neighbours share exactly one variable
        seed: Clause containing the first link variable

    Returns:
        DoublingTrace with len(chain) + 1 frontier sizes

    Raises:
        ChainError: broken chain or seed not on the first gadget
    """
    if not chain:
        return DoublingTrace(0, (1,))

    links = _chain_links(chain, seed)
    frontier: List[Clause] = [seed]
    sizes = [1]
    for gadget, link in zip(chain, links):
        wave: Dict[Clause, None] = {}
        for clause in frontier:
            for gadget_clause in gadget.clauses:
                if joint_variables(clause, gadget_clause) != (link,):
                    continue
                outcome = resolve(clause, gadget_clause)
                if not isinstance(outcome, Rejection):
                    wave.setdefault(outcome)
        frontier = list(wave)
        sizes.append(len(frontier))
        logger.debug(f"Link x{link}: frontier {len(frontier)}")
    return DoublingTrace(len(chain), tuple(sizes))


class GrowthLab:
    """Runs growth measurements under one budget and saves their reports"""

    def __init__(self, budget: Optional[Budget] = None):
        """
        Initialize the lab

        Args:
            budget: Saturation limits shared by every measurement
        """
        self.budget = budget or Budget()

    def measure(self, formula: Formula, descriptor: Optional[GrowthDescriptor] = None) -> GrowthReport:
        return measure_growth(formula, self.budget, descriptor)

    def measure_instance(self, instance: CcnfInstance) -> GrowthReport:
        return self.measure(instance.formula, GrowthDescriptor.from_instance(instance))

    def measure_file(self, cnf_file: str, sidecar_file: Optional[str] = None) -> GrowthReport:
        formula = parse_dimacs_file(cnf_file)
        descriptor = GrowthDescriptor.from_comments(formula.comments)
        if sidecar_file:
            with open(sidecar_file, 'r', encoding='utf-8') as f:
                descriptor = GrowthDescriptor.from_sidecar(json.load(f), descriptor.instance)
        return self.measure(formula, descriptor)

    def doubling(self, length: int, seed: Optional[Clause] = None) -> DoublingTrace:
        return doubling_check(s4_chain(length), seed or Clause((Literal(1),)))

    def save_report(self, report: GrowthReport, output_file: str):
        """
        Save a report as JSON

        Args:
            report: Report to save
            output_file: Path to output JSON file
        """
        with open(output_file, 'w', encoding='utf-8') as f:
            json.dump(report.to_json(), f, indent=2, ensure_ascii=False)
        logger.info(f"Report saved: {output_file}")


def main():
    """Main function for command line"""
    parser = argparse.ArgumentParser(description='Measure saturation growth of a CNF file')
    parser.add_argument('cnf_file', help='Path to DIMACS CNF file')
    parser.add_argument('--sidecar', help='Generation sidecar JSON describing the instance')
    parser.add_argument('--max-clauses', type=int, default=Budget().max_clauses,
                        help='Clause budget for saturation')
    parser.add_argument('--doubling', type=int, metavar='LENGTH',
                        help='Also trace an S4 chain of this length')

    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)

    try:
        lab = GrowthLab(Budget(max_clauses=args.max_clauses))
        report = lab.measure_file(args.cnf_file, args.sidecar)
    except (OSError, ValueError) as e:
        logger.error(f"Error: {e}")
        exit(1)

    print(json.dumps(report.to_json(), indent=2, ensure_ascii=False))
    if args.doubling is not None:
        print(json.dumps(lab.doubling(args.doubling).to_json()))


if __name__ == "__main__":
    main()
