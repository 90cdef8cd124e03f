#!/usr/bin/env python3
"""
Tests for growth measurement, closed-form ratios and S4 chain doubling
"""

import json
import os
import sys
from decimal import Decimal
from fractions import Fraction

import pytest

# Add current folder to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cnf_formula import Clause, Formula, emit_dimacs
from cnf_samples import PETERSEN_ROW, PETERSEN_SMALL_BUDGET_ROW
from growth_lab import (
    ChainError,
    GrowthDescriptor,
    GrowthLab,
    GrowthReport,
    closed_form_ratio,
    doubling_check,
    grouped_growth,
    measure_growth,
    moore_size,
    s4_chain,
)
from resolution_engine import Budget, saturate
from scnf_generator import GenerationSpec, build_instance, s4cnf
from utils import reports_to_csv


@pytest.fixture(scope="module")
def petersen():
    return build_instance(GenerationSpec("petersen", "all-s4"))


def clause(*values):
    return Clause.from_dimacs(values)


def test_moore_size():
    assert [moore_size(k) for k in (1, 2, 3)] == [4, 10, 22]
    with pytest.raises(ValueError):
        moore_size(0)


def test_closed_form_ratio():
    print("🔍 Testing closed-form ratio...")
    assert closed_form_ratio(2, 2) == Fraction(8, 5)
    assert closed_form_ratio(2, Fraction(3, 2)) == Fraction(4, 5)
    irrational = closed_form_ratio(1, Fraction(3, 2))
    assert isinstance(irrational, Decimal)
    assert abs(float(irrational) - 2 ** 1.5 / 4) < 1e-12
    print("✅ Exact when k*c0 is an integer")


def test_descriptor_from_comments():
    descriptor = GrowthDescriptor.from_comments(["generated", "ccnf petersen kinds all-s4 girth 5 k 2 c0 2"])
    assert descriptor == GrowthDescriptor("petersen", 2, Fraction(2), "all-s4")
    assert GrowthDescriptor.from_comments(["hello"]) == GrowthDescriptor()


def test_descriptor_from_comments_with_seed():
    descriptor = GrowthDescriptor.from_comments(["ccnf random-n14-g5-s7 kinds all-s4 girth 5 k 2 c0 2 seed 3"])
    assert descriptor == GrowthDescriptor("random-n14-g5-s7", 2, Fraction(2), "all-s4", 3)


def test_descriptor_from_sidecar():
    data = {
        "graph": "random-n8-g3-s4",
        "k": 1,
        "c0": "3/2",
        "generation": {"graph": {"nodes": 8, "min_girth": 3, "seed": 4}, "kinds": ["S3", "S4"]},
    }
    descriptor = GrowthDescriptor.from_sidecar(data)
    assert descriptor == GrowthDescriptor("random-n8-g3-s4", 1, Fraction(3, 2), "mixed", 4)
    assert GrowthDescriptor.from_sidecar({}, "fixture").instance == "fixture"


def test_measure_ad_hoc_formula():
    report = measure_growth(Formula.from_dimacs([[1], [-1]]))
    assert report.per_round_new == (1,)
    assert report.ratio == Fraction(1, 2)
    assert report.empty_clause_found
    assert report.closed_form_ratio is None
    assert report.to_csv_row() == "ad-hoc,,,,,2,1,0.5,1,false,\n"


def test_measure_petersen_all_s4(petersen):
    print("🔍 Measuring Petersen all-S4 under a 200 clause budget...")
    report = GrowthLab(Budget(max_clauses=200)).measure_instance(petersen)
    assert report.input_size == 40
    assert report.per_round_new == (120, 40)
    assert report.total_consequents == 160
    assert report.ratio == 4
    assert report.rounds == 2
    assert report.truncated
    assert report.closed_form_ratio == Fraction(8, 5)
    assert report.to_csv_row() == PETERSEN_SMALL_BUDGET_ROW
    assert report.to_csv_row(header=True).splitlines()[0] == ",".join(GrowthReport.CSV_FIELDS)
    print("✅ 120 consequents in round one, 8 per edge")


def test_measure_petersen_default_budget(petersen):
    """Three runs under the default budget reproduce the pinned row byte for byte"""
    print("🔍 Measuring Petersen all-S4 under the default budget (three runs)...")
    rows = []
    for _ in range(3):
        report = GrowthLab().measure_instance(petersen)
        rows.append(report.to_csv_row())
    assert report.per_round_new == (120, 3840, 996000)
    assert report.input_size + report.total_consequents == Budget().max_clauses
    assert report.truncated
    assert not report.empty_clause_found
    assert rows == [PETERSEN_ROW] * 3
    print("✅ Truncated in round three, identical across runs")


def test_grouped_growth_per_edge(petersen):
    result = saturate(petersen.formula, Budget(max_rounds=1))
    assert result.truncated
    assert grouped_growth(result) == {variable: 8 for variable in range(1, 16)}


def test_k4_all_s3_saturates():
    instance = build_instance(GenerationSpec("k4", "all-s3"))
    result = saturate(instance.formula)
    assert result.per_round_new[0] == 24
    assert not result.truncated
    assert not result.empty_clause_found


def test_doubling_trace():
    print("🔍 Testing S4 chain doubling...")
    trace = doubling_check(s4_chain(3), clause(1))
    assert trace.frontier_sizes == (1, 2, 4, 8)
    assert trace.growth_factors == (2, 2, 2)
    assert trace.to_json() == {"chain_length": 3, "frontier_sizes": [1, 2, 4, 8]}
    assert GrowthLab().doubling(1).frontier_sizes == (1, 2)
    assert GrowthLab().doubling(0).frontier_sizes == (1,)
    print("✅ Frontier doubles at every gadget")


def test_doubling_rejects_broken_chains():
    with pytest.raises(ChainError):
        doubling_check([s4cnf((1, 2, 3)), s4cnf((2, 3, 4))], clause(1))
    with pytest.raises(ChainError):
        doubling_check(s4_chain(2), clause(9))
    with pytest.raises(ValueError):
        s4_chain(-1)


def test_measure_file_and_reports(petersen, tmp_path):
    cnf_file = tmp_path / "petersen.cnf"
    cnf_file.write_text(emit_dimacs(petersen.formula), encoding="utf-8")
    sidecar_file = tmp_path / "petersen.json"
    sidecar_file.write_text(json.dumps(petersen.sidecar()), encoding="utf-8")

    lab = GrowthLab(Budget(max_clauses=200))
    from_comments = lab.measure_file(str(cnf_file))
    from_sidecar = lab.measure_file(str(cnf_file), str(sidecar_file))
    assert from_comments.to_csv_row() == PETERSEN_SMALL_BUDGET_ROW
    assert from_sidecar.to_csv_row() == PETERSEN_SMALL_BUDGET_ROW

    report_file = tmp_path / "report.json"
    lab.save_report(from_sidecar, str(report_file))
    saved = json.loads(report_file.read_text(encoding="utf-8"))
    assert saved["per_round_new"] == [120, 40]
    assert saved["closed_form_ratio"] == 1.6

    csv_file = tmp_path / "reports.csv"
    reports_to_csv([str(report_file)], str(csv_file))
    lines = csv_file.read_text(encoding="utf-8").splitlines(keepends=True)
    assert lines[0] == ",".join(GrowthReport.CSV_FIELDS) + "\n"
    assert lines[1] == PETERSEN_SMALL_BUDGET_ROW


def main():
    """Main test function"""
    print("🧪 === GROWTH LAB TESTS ===\n")

    tests = [
        test_moore_size,
        test_closed_form_ratio,
        test_descriptor_from_comments,
        test_descriptor_from_comments_with_seed,
        test_descriptor_from_sidecar,
        test_measure_ad_hoc_formula,
        test_k4_all_s3_saturates,
        test_doubling_trace,
        test_doubling_rejects_broken_chains,
    ]

    passed = 0
    total = len(tests)

    for test in tests:
        try:
            test()
            passed += 1
            print()
        except Exception as e:
            print(f"❌ Unexpected error in test {test.__name__}: {e!r}\n")

    print("📊 === TEST RESULTS ===")
    print(f"Tests passed: {passed}/{total}")

    if passed == total:
        print("🎉 All tests passed successfully!")
        return 0
    else:
        print("⚠️  Not all tests passed")
        return 1


if __name__ == "__main__":
    exit(main())
