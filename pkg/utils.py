#!/usr/bin/env python3
"""
Utilities for working with formulas and growth reports
"""

import json
import csv
import sys
from typing import Dict, List, Any
import argparse

from cnf_formula import Formula, is_tautology, kind_histogram, parse_dimacs_file
from growth_lab import GrowthReport

STDIO = "-"


def read_text(path: str) -> str:
    """
    Read a whole text input

    Args:
        path: File path, or "-" for standard input

    Returns:
        File contents
    """
    if path == STDIO:
        return sys.stdin.read()
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def write_text(path: str, text: str):
    """
    Write a text artifact

    Args:
        path: File path, or "-" for standard output
        text: Contents, written unchanged
    """
    if path == STDIO:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)


def json_text(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def save_json(data: Any, json_file: str):
    with open(json_file, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def load_json(json_file: str) -> Any:
    with open(json_file, 'r', encoding='utf-8') as f:
        return json.load(f)


def formula_statistics(formula: Formula) -> Dict[str, Any]:
    """
    Structural statistics of a formula

    Args:
        formula: Parsed formula

    Returns:
        Counts of variables, clauses, clause kinds and widths
    """
    widths: Dict[str, int] = {}
    for clause in formula.clauses:
        widths[str(clause.width)] = widths.get(str(clause.width), 0) + 1
    kinds = kind_histogram(formula)

    return {
        "variables": formula.variable_count,
        "clauses": len(formula.clauses),
        "distinct_clauses": len(set(formula.clauses)),
        "max_width": formula.max_width,
        "widths": dict(sorted(widths.items(), key=lambda item: int(item[0]))),
        "kinds": kinds,
        "horn": kinds["non-horn"] == 0,
        "tautologies": sum(1 for clause in formula.clauses if is_tautology(clause)),
        "empty_clauses": sum(1 for clause in formula.clauses if clause.is_empty),
    }


def reports_to_csv(json_files: List[str], csv_file: str):
    """
    Collect saved growth reports into one CSV table

    Args:
        json_files: Paths to report JSON files
        csv_file: Path to output CSV file
    """
    with open(csv_file, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator="\n")

        # Headers
        writer.writerow(GrowthReport.CSV_FIELDS)

        # Data
        for json_file in json_files:
            data = load_json(json_file)
            data["consequents"] = data.get("total_consequents", "")
            row = []
            for name in GrowthReport.CSV_FIELDS:
                value = data.get(name)
                if value is None:
                    value = ""
                elif isinstance(value, bool):
                    value = "true" if value else "false"
                row.append(value)
            writer.writerow(row)

    print(f"CSV file saved: {csv_file}")


def print_statistics(cnf_file: str):
    """
    Output formula statistics

    Args:
        cnf_file: Path to DIMACS file
    """
    stats = formula_statistics(parse_dimacs_file(cnf_file))

    print("=== Formula Statistics ===")
    print(f"File: {cnf_file}")
    print(f"Variables: {stats['variables']}")
    print(f"Clauses: {stats['clauses']} ({stats['distinct_clauses']} distinct)")
    print(f"Maximum width: {stats['max_width']}")
    print(f"Horn: {'yes' if stats['horn'] else 'no'}")
    print()

    print("=== Clause Kinds ===")
    for kind, count in stats['kinds'].items():
        print(f"{kind}: {count}")
    print()

    print("=== Widths ===")
    for width, count in stats['widths'].items():
        print(f"{width}: {count}")


def main():
    """Main function for command line"""
    parser = argparse.ArgumentParser(description='Utilities for working with formulas and growth reports')
    parser.add_argument('files', nargs='+', help='DIMACS files (--stats) or report JSON files (--csv)')
    parser.add_argument('--csv', help='Collect report JSON files into this CSV file')
    parser.add_argument('--stats', action='store_true', help='Show formula statistics')

    args = parser.parse_args()

    if not args.csv and not args.stats:
        print("Select at least one option: --csv or --stats")
        return

    try:
        if args.csv:
            reports_to_csv(args.files, args.csv)

        if args.stats:
            for cnf_file in args.files:
                print_statistics(cnf_file)

    except Exception as e:
        print(f"Error: {e}")


if __name__ == "__main__":
    main()
