#!/usr/bin/env python3
"""
rescnf command line
Solve, reduce, generate, measure and validate DIMACS CNF formulas

Exit status: 10 satisfiable, 20 unsatisfiable, 1 error, 0 otherwise
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from cnf_formula import DimacsParseError, Formula, emit_dimacs, parse_dimacs
from growth_lab import GrowthDescriptor, GrowthLab
from rcnf_transform import MetaVariableTable, horn_to_rcnf, rcnf_of, split_horn3
from resolution_engine import (
    DEFAULT_MAX_CLAUSES,
    DEFAULT_MAX_ROUNDS,
    Budget,
    SatResult,
    brute_force_sat,
    horn_sat,
    saturate,
)
from scnf_generator import (
    GenerationSpec,
    build_instance,
    load_generation_spec,
    parse_c0,
    parse_graph_source,
)
from utils import STDIO, formula_statistics, json_text, load_json, read_text, save_json, write_text

# Configure logging
logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SAT = 10
EXIT_UNSAT = 20

FORMATS = ("dimacs", "json", "csv")
# Output formats each subcommand can produce; the first is the default
COMMAND_FORMATS = {
    "solve": ("dimacs", "json"),
    "reduce": ("dimacs",),
    "gen": ("dimacs",),
    "measure": ("json", "csv"),
    "validate": ("json",),
}


@dataclass
class RunConfig:
    """One parsed invocation"""

    command: str
    input: str = STDIO
    output: str = STDIO
    output_format: str = "dimacs"
    seed: Optional[int] = None
    budget: Budget = field(default_factory=Budget)
    verbose: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        allowed = COMMAND_FORMATS[args.command]
        output_format = args.format or allowed[0]
        if output_format not in allowed:
            raise ValueError(f"{args.command} cannot write --format {output_format}; "
                             f"choose from {', '.join(allowed)}")

        common = {"command", "input", "output", "format", "seed", "budget_clauses",
                  "budget_rounds", "budget_width", "verbose"}
        return cls(
            command=args.command,
            input=args.input,
            output=args.output,
            output_format=output_format,
            seed=args.seed,
            budget=Budget(args.budget_clauses, args.budget_rounds, args.budget_width),
            verbose=args.verbose,
            options={k: v for k, v in vars(args).items() if k not in common},
        )


def _read_formula(config: RunConfig) -> Formula:
    return parse_dimacs(read_text(config.input))


def _summary(message: str):
    """Human summaries go to standard error"""
    print(message, file=sys.stderr)


def cmd_solve(config: RunConfig) -> int:
    """
    Decide satisfiability with the selected engine

    Returns:
        10 SAT, 20 UNSAT, 0 when a truncated saturation leaves it open
    """
    formula = _read_formula(config)
    engine = config.options["engine"]
    logger.debug(f"Solving {len(formula.clauses)} clauses with engine {engine}")

    result: Optional[SatResult]
    truncated = False
    if engine == "horn":
        result = horn_sat(formula)
    elif engine == "brute":
        result = brute_force_sat(formula)
    elif not formula.clauses:
        result = SatResult(True)
    else:
        saturation = saturate(formula, config.budget)
        truncated = saturation.truncated
        if saturation.empty_clause_found:
            result = SatResult(False)
        elif truncated:
            result = None
        else:
            result = SatResult(True)

    if result is None:
        status, code = "UNKNOWN", EXIT_OK
        logger.warning("Saturation budget exhausted before a verdict")
    elif result.satisfiable:
        status, code = "SATISFIABLE", EXIT_SAT
    else:
        status, code = "UNSATISFIABLE", EXIT_UNSAT

    model = result.model if result is not None else None
    if config.output_format == "json":
        text = json_text({
            "engine": engine,
            "result": status,
            "model": model.to_dimacs() if model else None,
        })
    else:
        lines = [f"s {status}"]
        if model:
            lines.append("v " + " ".join(str(v) for v in model.to_dimacs() + [0]))
        text = "\n".join(lines) + "\n"

    write_text(config.output, text)
    return code


def cmd_reduce(config: RunConfig) -> int:
    """Write the horn3, horn-rcnf or rcnf-closure reduction of the input"""
    formula = _read_formula(config)
    mode = config.options["mode"]
    sidecar: Optional[Dict[str, Any]] = None
    note = ""

    if mode == "horn3":
        reduced = split_horn3(formula)
        fresh = reduced.variable_count - formula.variable_count
        sidecar = {"fresh_variables": list(range(formula.variable_count + 1, reduced.variable_count + 1))}
        note = f", {fresh} fresh variables"
    elif mode == "horn-rcnf":
        table = MetaVariableTable()
        reduced = horn_to_rcnf(formula, table)
        sidecar = table.sidecar()
    else:
        if not formula.clauses:
            raise ValueError("rcnf-closure needs at least one clause")
        encoding = rcnf_of(formula, config.budget)
        reduced = encoding.formula
        sidecar = encoding.sidecar()
        note = ", truncated" if encoding.truncated else ""

    write_text(config.output, emit_dimacs(reduced))
    if config.options.get("sidecar"):
        save_json(sidecar, config.options["sidecar"])

    _summary(f"{mode}: {len(formula.clauses)} clauses, {formula.variable_count} variables -> "
             f"{len(reduced.clauses)} clauses, {reduced.variable_count} variables{note}")
    return EXIT_OK


def _generation_spec(config: RunConfig) -> GenerationSpec:
    default_seed = config.seed if config.seed is not None else 0
    if config.options.get("spec"):
        return load_generation_spec(load_json(config.options["spec"]), default_seed)

    kinds = config.options["kinds"]
    if "," in kinds:
        kinds = tuple(kind.strip() for kind in kinds.split(","))
    return GenerationSpec(
        graph=parse_graph_source(config.options["graph"], default_seed),
        kinds=kinds,
        c0=parse_c0(config.options["c0"]),
        polarity_seed=config.options.get("polarity_seed"),
    )


def cmd_gen(config: RunConfig) -> int:
    """Generate a CCNF instance and print its condition report"""
    instance = build_instance(_generation_spec(config))

    write_text(config.output, emit_dimacs(instance.formula))
    if config.options.get("sidecar"):
        save_json(instance.sidecar(), config.options["sidecar"])

    _summary(instance.report.summary())
    return EXIT_OK


def cmd_measure(config: RunConfig) -> int:
    """Saturate the input and emit its growth report"""
    formula = _read_formula(config)
    if not formula.clauses:
        raise ValueError("measure needs at least one clause")

    descriptor = GrowthDescriptor.from_comments(formula.comments)
    if config.options.get("sidecar"):
        descriptor = GrowthDescriptor.from_sidecar(load_json(config.options["sidecar"]), descriptor.instance)

    report = GrowthLab(config.budget).measure(formula, descriptor)
    if config.output_format == "csv":
        write_text(config.output, report.to_csv_row())
    else:
        write_text(config.output, json_text(report.to_json()))

    closed_form = report.closed_form_ratio
    _summary(f"measured ratio {float(report.ratio):.6f}"
             + (f", closed form {float(closed_form):.6f}" if closed_form is not None else "")
             + (" (truncated)" if report.truncated else ""))
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    """Parse the input and report its statistics"""
    try:
        formula = _read_formula(config)
    except DimacsParseError as e:
        write_text(config.output, json_text({"valid": False, "line": e.line_number, "error": str(e)}))
        logger.error(f"Error: {e}")
        return EXIT_ERROR

    stats = {"valid": True}
    stats.update(formula_statistics(formula))
    write_text(config.output, json_text(stats))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "gen": cmd_gen,
    "measure": cmd_measure,
    "validate": cmd_validate,
}


def _add_global_options(parser: argparse.ArgumentParser, with_defaults: bool = True):
    """Options accepted before and after the subcommand; only the top level holds defaults"""

    def default(value):
        return value if with_defaults else argparse.SUPPRESS

    parser.add_argument("-i", "--input", default=default(STDIO),
                        help="Input file, - for standard input (default: -)")
    parser.add_argument("-o", "--output", default=default(STDIO),
                        help="Output file, - for standard output (default: -)")
    parser.add_argument("--format", choices=FORMATS, default=default(None),
                        help="Output format (default depends on command)")
    parser.add_argument("--seed", type=int, default=default(None),
                        help="Seed for random graphs without their own seed")
    parser.add_argument("--budget-clauses", type=int, default=default(DEFAULT_MAX_CLAUSES),
                        help=f"Saturation clause budget (default: {DEFAULT_MAX_CLAUSES})")
    parser.add_argument("--budget-rounds", type=int, default=default(DEFAULT_MAX_ROUNDS),
                        help=f"Saturation round budget (default: {DEFAULT_MAX_ROUNDS})")
    parser.add_argument("--budget-width", type=int, default=default(None),
                        help="Drop resolvents wider than this")
    parser.add_argument("--verbose", "-v", action="store_true", default=default(False),
                        help="Enable verbose logging")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, with_defaults=False)

    parser = argparse.ArgumentParser(
        prog="rescnf",
        description="Resolution, RCNF and CCNF toolkit for DIMACS CNF formulas",
    )
    _add_global_options(parser)
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    solve_parser = subparsers.add_parser("solve", parents=[common], help="Decide satisfiability")
    solve_parser.add_argument("--engine", default="brute", choices=["horn", "saturate", "brute"],
                              help="horn: unit propagation, saturate: resolution, brute: backtracking")

    reduce_parser = subparsers.add_parser("reduce", parents=[common], help="Rewrite a formula")
    reduce_parser.add_argument("--mode", required=True, choices=["horn3", "horn-rcnf", "rcnf-closure"],
                               help="Reduction to apply")
    reduce_parser.add_argument("--sidecar", help="Write the variable map JSON here")

    gen_parser = subparsers.add_parser("gen", parents=[common], help="Generate a CCNF instance")
    gen_parser.add_argument("--graph", default="petersen",
                            help="k4, petersen, mcgee or a JSON random spec (default: petersen)")
    gen_parser.add_argument("--kinds", default="all-s4",
                            help="all-s3, all-s4 or comma-separated S3/S4 per node (default: all-s4)")
    gen_parser.add_argument("--c0", default="2", help="S4 density constant > 1 (default: 2)")
    gen_parser.add_argument("--polarity-seed", type=int, help="Randomize role polarities with this seed")
    gen_parser.add_argument("--spec", help="JSON generation spec file, overrides the flags above")
    gen_parser.add_argument("--sidecar", help="Write the node/edge/variable JSON here")

    measure_parser = subparsers.add_parser("measure", parents=[common], help="Measure saturation growth")
    measure_parser.add_argument("--sidecar", help="Generation sidecar describing the instance")

    subparsers.add_parser("validate", parents=[common], help="Check a DIMACS file and print statistics")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main function for command line"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR

    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except (OSError, ValueError) as e:
        logger.error(f"Error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
