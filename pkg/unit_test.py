#!/usr/bin/env python3
"""
Unit tests for the formula core and the resolution engine
"""

import os
import random
import sys

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

# Add current folder to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cnf_formula import (
    Clause,
    ClauseKind,
    DimacsParseError,
    Formula,
    Literal,
    classify,
    emit_dimacs,
    evaluate_formula,
    is_horn,
    is_tautology,
    parse_dimacs,
)
from cnf_samples import assignments, random_formula
from resolution_engine import (
    Assignment,
    Budget,
    Conflict,
    NotHornError,
    OracleLimitError,
    Rejection,
    RejectionReason,
    ResolutionStep,
    brute_force_sat,
    group_by_joint_variable,
    horn_sat,
    joint_variables,
    oracle_limit,
    resolve,
    saturate,
    unit_propagate,
)


def clause(*values):
    return Clause.from_dimacs(values)


def formula(*clauses, variable_count=None):
    return Formula.from_dimacs(clauses, variable_count)


def test_clause_canonical_order():
    """Ascending variables, negative literal first, duplicates dropped"""
    print("🔍 Testing canonical clause order...")
    c = clause(3, -1, 1, 3)
    assert c.to_dimacs() == [-1, 1, 3]
    assert c.width == 3
    assert c == clause(1, 3, -1)
    assert Clause.from_canonical(c.literals) == c
    assert str(c) == "(-1 1 3)"
    assert Literal.from_dimacs(-4) == Literal(4, False)
    assert -Literal(2) == Literal(2, False)
    print("✅ Clauses are canonical")


def test_literal_rejects_variable_zero():
    with pytest.raises(ValueError):
        Literal(0)
    with pytest.raises(ValueError):
        Literal.from_dimacs(0)


def test_formula_variable_count_bound():
    with pytest.raises(ValueError):
        Formula((clause(1, 3),), 2)
    assert formula([1, -3]).variable_count == 3


def test_parse_dimacs():
    """Comments, header and zero-terminated clause lines"""
    print("🔍 Testing DIMACS parsing...")
    f = parse_dimacs("c first\nc\np cnf 3 3\n1 -2 0\n-3 0\n0\n")
    assert f.variable_count == 3
    assert f.clauses == (clause(1, -2), clause(-3), Clause())
    assert f.comments == ("first", "")
    assert f.clauses[2].is_empty
    print("✅ DIMACS parsed")


def test_parse_dimacs_several_clauses_per_line():
    f = parse_dimacs("p cnf 2 2\n1 0 -2 0\n%\n0\n")
    assert f.clauses == (clause(1), clause(-2))


@pytest.mark.parametrize("text, line_number", [
    ("p cnf 2 1\n1 3 0\n", 2),
    ("p cnf 2 1\n1 -2\n", 2),
    ("1 0\n", 1),
    ("c note\np cnf x 1\n", 2),
    ("p cnf 2\n", 1),
    ("p cnf 2 1\np cnf 2 1\n", 2),
    ("p cnf 2 1\n\n1 a 0\n", 3),
])
def test_parse_dimacs_errors(text, line_number):
    """Every malformed input reports the offending line"""
    with pytest.raises(DimacsParseError) as info:
        parse_dimacs(text)
    assert info.value.line_number == line_number


def test_parse_dimacs_missing_header():
    with pytest.raises(DimacsParseError):
        parse_dimacs("c only a comment\n")


def test_emit_dimacs():
    print("🔍 Testing DIMACS emission...")
    assert emit_dimacs(Formula()) == "p cnf 0 0\n"
    assert emit_dimacs(formula([1, -2], variable_count=2)) == "p cnf 2 1\n1 -2 0\n"
    with_comment = Formula((clause(-1),), 1, ("made by hand",))
    assert emit_dimacs(with_comment) == "c made by hand\np cnf 1 1\n-1 0\n"
    print("✅ DIMACS emitted")


clause_values = st.lists(
    st.integers(min_value=1, max_value=6).flatmap(lambda v: st.sampled_from([v, -v])),
    max_size=4,
)


@given(st.lists(clause_values, max_size=8), st.lists(st.text(alphabet="abc xyz", max_size=10), max_size=2))
@settings(max_examples=100)
def test_dimacs_round_trip(clauses, comments):
    f = Formula(tuple(Clause.from_dimacs(c) for c in clauses), 6, tuple(c.strip() for c in comments))
    parsed = parse_dimacs(emit_dimacs(f))
    assert parsed == f
    assert parsed.comments == f.comments


def test_classify():
    print("🔍 Testing clause classification...")
    assert classify(clause(1)) is ClauseKind.POSITIVE_UNIT
    assert classify(clause(1, -2)) is ClauseKind.DEFINITE
    assert classify(clause(-1, -2)) is ClauseKind.GOAL
    assert classify(Clause()) is ClauseKind.GOAL
    assert classify(clause(1, 2)) is ClauseKind.NON_HORN
    assert is_horn(formula([1], [-1, 2], [-2, -3]))
    assert not is_horn(formula([1], [1, 2]))
    print("✅ Clause kinds correct")


def test_is_tautology():
    assert is_tautology(clause(1, -1))
    assert is_tautology(clause(2, -1, 1))
    assert not is_tautology(clause(1, 2))
    assert not is_tautology(Clause())


def test_joint_variables():
    assert joint_variables(clause(1, 2), clause(-1, 3)) == (1,)
    assert joint_variables(clause(1, 2), clause(-1, -2)) == (1, 2)
    assert joint_variables(clause(1, 2), clause(1, 3)) == ()


def test_resolve():
    print("🔍 Testing resolution...")
    assert resolve(clause(1, 2), clause(-1, 3)) == clause(2, 3)
    assert resolve(clause(-1, 3), clause(1, 2)) == clause(2, 3)
    assert resolve(clause(1), clause(-1)) == Clause()

    rejected = resolve(clause(1, 2), clause(-1, -2))
    assert rejected == Rejection(RejectionReason.TAUTOLOGY, (1, 2))
    assert resolve(clause(1, 2), clause(1, 3)) == Rejection(RejectionReason.NO_JOINT, ())
    assert isinstance(resolve(clause(1, -1), clause(-1, 2)), Rejection)
    print("✅ Resolution rule works")


def test_saturate_refutes_unit_pair():
    print("🔍 Testing saturation on (x1)(-x1)...")
    result = saturate(formula([1], [-1]))
    assert result.empty_clause_found
    assert result.rounds == 1
    assert result.per_round_new == (1,)
    assert result.derived == (clause(1), clause(-1), Clause())
    assert result.steps == (ResolutionStep(0, 1, 1, 2),)
    assert not result.truncated
    print("✅ Empty clause derived in round 1")


def test_saturate_levels():
    result = saturate(formula([1, 2], [-1, 3]))
    assert result.derived == (clause(1, 2), clause(-1, 3), clause(2, 3))
    assert result.steps == (ResolutionStep(0, 1, 1, 2),)
    assert result.per_round_new == (1, 0)
    assert result.rounds == 2
    assert not result.empty_clause_found
    assert not result.truncated
    assert result.consequents == (clause(2, 3),)


def test_saturate_unsatisfiable_square():
    result = saturate(formula([1, 2], [-1, 2], [1, -2], [-1, -2]))
    assert result.empty_clause_found
    assert result.derived[-1] == Clause()


def test_saturate_duplicates_and_empty_input():
    result = saturate(formula([1, 2], [2, 1], [-1, 3]))
    assert result.input_count == 2
    assert result.input_indices == (0, 0, 1)

    empty = saturate(Formula((clause(1), Clause()), 1))
    assert empty.empty_clause_found
    assert empty.rounds == 0
    assert empty.steps == ()


def test_saturate_budgets():
    """Each limit truncates without raising"""
    print("🔍 Testing saturation budgets...")
    square = formula([1, 2], [-1, 2], [1, -2], [-1, -2])
    clipped = saturate(square, Budget(max_clauses=3))
    assert clipped.truncated
    assert not clipped.empty_clause_found
    assert clipped.steps == ()
    assert clipped.per_round_new == (0,)

    chain = formula([1, 2], [-1, 3])
    one_round = saturate(chain, Budget(max_rounds=1))
    assert one_round.truncated
    assert one_round.per_round_new == (1,)

    narrow = saturate(chain, Budget(max_clause_width=1))
    assert narrow.truncated
    assert len(narrow.derived) == 2
    print("✅ Budgets flag truncation")


def test_saturate_skips_clashing_and_tautological_pairs():
    """Two complementary literals or a tautological antecedent give no step"""
    double_clash = saturate(formula([1, 2], [-1, -2]))
    assert double_clash.steps == ()
    assert double_clash.per_round_new == (0,)

    tautology = saturate(formula([1, -1], [-1, 2], [1, 3]))
    assert tautology.derived[3:] == (clause(2, 3),)
    assert tautology.steps == (ResolutionStep(2, 1, 1, 3),)


def test_saturate_without_steps():
    rng = random.Random(17)
    for _ in range(20):
        f = random_formula(rng, 6, 10)
        full = saturate(f)
        counted = saturate(f, record_steps=False)
        assert counted.steps == ()
        assert counted.derived == full.derived
        assert counted.per_round_new == full.per_round_new
        assert counted.empty_clause_found == full.empty_clause_found


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(max_clauses=0)
    with pytest.raises(ValueError):
        Budget(max_rounds=0)
    with pytest.raises(ValueError):
        Budget(max_clause_width=0)


def test_saturate_requires_clauses():
    with pytest.raises(ValueError):
        saturate(Formula())


def test_saturate_is_deterministic():
    rng = random.Random(11)
    for _ in range(20):
        f = random_formula(rng, 6, 10)
        assert saturate(f) == saturate(f)


def test_saturation_json():
    data = saturate(formula([1], [-1])).to_json()
    assert data["derived"] == [[1], [-1], []]
    assert data["steps"] == [{"pos": 0, "neg": 1, "var": 1, "out": 2}]
    assert data["rounds"] == 1
    assert data["empty_clause_found"] is True
    assert data["truncated"] is False
    assert data["per_round_new"] == [1]


def test_steps_are_sound():
    """Every recorded step is a valid single-variable resolution"""
    rng = random.Random(5)
    for _ in range(30):
        result = saturate(random_formula(rng, 5, 8))
        for step in result.steps:
            pos = result.derived[step.positive_antecedent]
            neg = result.derived[step.negative_antecedent]
            out = result.derived[step.consequent]
            assert Literal(step.joint_variable, True) in pos
            assert Literal(step.joint_variable, False) in neg
            assert step.joint_variable not in out.variables()
            for assignment in assignments(pos.variables() | neg.variables()):
                if evaluate_formula(Formula((pos, neg), 5), assignment):
                    assert evaluate_formula(Formula((out,), 5), assignment)


def test_group_by_joint_variable():
    groups = group_by_joint_variable(saturate(formula([1, 2], [-1, 3])))
    assert list(groups) == [1]
    assert groups[1].positive_antecedents == frozenset({0})
    assert groups[1].negative_antecedents == frozenset({1})
    assert groups[1].consequents == frozenset({2})
    assert groups[1].size == 1


def test_unit_propagate():
    print("🔍 Testing unit propagation...")
    conflict = unit_propagate(formula([1], [-1, 2], [-2]))
    assert isinstance(conflict, Conflict)
    assert conflict.clause_index == 2
    assert conflict.assignment.values == {1: True, 2: True}

    idle = unit_propagate(formula([-1, 2]))
    assert isinstance(idle, Assignment)
    assert idle.values == {}
    assert not idle.is_total()

    forced = unit_propagate(formula([1], [-1, 2]))
    assert forced.values == {1: True, 2: True}
    assert forced.is_total()
    print("✅ Unit propagation works")


def test_horn_sat():
    print("🔍 Testing Horn satisfiability...")
    assert not horn_sat(formula([1], [-1, 2], [-2])).satisfiable
    result = horn_sat(formula([-1, -2]))
    assert result.satisfiable
    assert result.model.values == {1: False, 2: False}
    assert result.verdict == "SAT"

    with pytest.raises(NotHornError) as info:
        horn_sat(formula([1], [-1, 2], [2, 3]))
    assert info.value.clause_index == 2
    assert info.value.clause == clause(2, 3)
    print("✅ Horn engine works")


def test_brute_force_sat():
    print("🔍 Testing brute-force oracle...")
    assert not brute_force_sat(formula([1, 2], [-1], [-2])).satisfiable

    result = brute_force_sat(formula([1, 2], [-1]))
    assert result.satisfiable
    assert result.model.to_dimacs() == [-1, 2]

    # unused variables are completed to false
    padded = brute_force_sat(formula([2], variable_count=3))
    assert padded.model.values == {1: False, 2: True, 3: False}
    assert brute_force_sat(Formula()).satisfiable
    assert not brute_force_sat(Formula((Clause(),), 0)).satisfiable
    print("✅ Oracle verified")


def test_brute_force_agrees_with_enumeration():
    rng = random.Random(3)
    for _ in range(100):
        f = random_formula(rng, 6, 12)
        expected = any(evaluate_formula(f, a) for a in assignments(range(1, f.variable_count + 1)))
        result = brute_force_sat(f)
        assert result.satisfiable == expected
        if result.satisfiable:
            assert result.model.is_total()
            assert result.model.satisfies(f)


def test_oracle_limit(monkeypatch):
    print("🔍 Testing oracle limit...")
    monkeypatch.delenv("RESCNF_ORACLE_LIMIT", raising=False)
    assert oracle_limit() == 24

    monkeypatch.setenv("RESCNF_ORACLE_LIMIT", "2")
    with pytest.raises(OracleLimitError) as info:
        brute_force_sat(formula([1, 2, 3]))
    assert info.value.limit == 2
    assert brute_force_sat(formula([1, 2, 3]), limit=3).satisfiable

    monkeypatch.setenv("RESCNF_ORACLE_LIMIT", "many")
    assert oracle_limit() == 24
    print("✅ Oracle limit enforced")


def main():
    """Main test function"""
    print("🧪 === RESCNF UNIT TESTS ===\n")

    tests = [
        test_clause_canonical_order,
        test_literal_rejects_variable_zero,
        test_formula_variable_count_bound,
        test_parse_dimacs,
        test_parse_dimacs_several_clauses_per_line,
        test_parse_dimacs_missing_header,
        test_emit_dimacs,
        test_classify,
        test_is_tautology,
        test_joint_variables,
        test_resolve,
        test_saturate_refutes_unit_pair,
        test_saturate_levels,
        test_saturate_unsatisfiable_square,
        test_saturate_duplicates_and_empty_input,
        test_saturate_budgets,
        test_saturate_skips_clashing_and_tautological_pairs,
        test_saturate_without_steps,
        test_budget_validation,
        test_saturate_requires_clauses,
        test_saturate_is_deterministic,
        test_saturation_json,
        test_steps_are_sound,
        test_group_by_joint_variable,
        test_unit_propagate,
        test_horn_sat,
        test_brute_force_sat,
        test_brute_force_agrees_with_enumeration,
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
