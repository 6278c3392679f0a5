from fractions import Fraction

import pytest

from spcheck.errors import BudgetExceededError
from spcheck.oracle import holds_cj, holds_mvd, oracle_check
from spcheck.constraints import SpCj, SpMvd
from spcheck.table import project
from spcheck.tuplegen import (
    check_nmvd,
    check_spcj_general,
    check_spcj_singular,
    check_spmvd,
    g3_spcj,
    g3_spmvd,
    g5_spcj,
    g5_spmvd,
)

from conftest import table

X = frozenset({0})
Y = frozenset({1})


def test_fig1_spmvd_verdicts(fig1_tables):
    a, b, c = fig1_tables
    assert check_spmvd(a, X, Y).holds
    assert check_spmvd(b, X, Y).holds
    assert not check_spmvd(c, X, Y).holds


def test_fig1_nmvd_verdicts(fig1_tables):
    a, b, c = fig1_tables
    assert not check_nmvd(a, X, Y)
    assert not check_nmvd(b, X, Y)
    assert check_nmvd(c, X, Y)


def test_nmvd_total_table_with_classical_mvd():
    t = table(["X", "Y", "Z"], [("1", "1", "1"), ("1", "2", "1")])
    assert holds_mvd(t.rows, X, Y, 3)
    assert check_nmvd(t, X, Y)


def test_mvd_witness_replays(fig1_tables):
    a, b, _ = fig1_tables
    for t in (a, b):
        verdict = check_spmvd(t, X, Y)
        assert holds_mvd(verdict.witness.rows, X, Y, t.arity)


def test_mvd_equivalent_to_rhs_minus_lhs(fig1_tables, mvd_trio):
    tables = list(fig1_tables) + list(mvd_trio)
    for t in tables:
        lhs = frozenset({0})
        rhs = frozenset({0, 1}) if t.arity > 2 else frozenset({1})
        direct = check_spmvd(t, lhs, rhs).holds
        reduced = check_spmvd(t, lhs, rhs - lhs).holds
        assert direct == reduced


def test_projection_non_monotone():
    # Violated on the full schema yet satisfied after dropping the last column.
    t = table(["X", "Y", "Z", "V"], [("1", "1", "1", "1"), (None, "2", "1", "2")])
    assert not check_spmvd(t, X, Y).holds
    assert check_spmvd(project(t, frozenset({0, 1, 2})), X, Y).holds


def test_mvd_trio_measures(mvd_trio):
    wide_x, wide_z, three = mvd_trio
    xw = frozenset({0, 1, 2, 3})
    assert g3_spmvd(wide_x, xw, frozenset({4})).fraction_str == "2/4"
    assert g5_spmvd(wide_x, xw, frozenset({4})).fraction_str == "1/4"
    assert g3_spmvd(wide_z, X, Y).fraction_str == "1/4"
    assert g5_spmvd(wide_z, X, Y).fraction_str == "2/4"
    assert g3_spmvd(three, X, Y).fraction_str == "1/3"
    assert g5_spmvd(three, X, Y).fraction_str == "1/3"


def test_mvd_measures_match_oracle(mvd_trio):
    from spcheck.oracle import oracle_g3, oracle_g5

    wide_z = mvd_trio[1]
    assert g3_spmvd(wide_z, X, Y).ratio == oracle_g3(wide_z, SpMvd(X, Y)).ratio
    assert g5_spmvd(wide_z, X, Y).ratio == oracle_g5(wide_z, SpMvd(X, Y)).ratio


def test_cj_singular_examples(cj_five):
    assert not check_spcj_singular(cj_five, 0, 1).holds
    full = table(["A", "B"], [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")])
    assert check_spcj_singular(full, 0, 1).holds
    two = table(["A", "B"], [("1", None), (None, "2")])
    assert check_spcj_singular(two, 0, 1).holds


def test_cj_singular_equals_general(cj_five, cj_four):
    tables = [
        cj_five,
        cj_four,
        table(["A", "B"], [("1", None), (None, "2")]),
        table(["A", "B"], [("1", "1"), ("2", "2")]),
        table(["A", "B"], [(None, None)]),
    ]
    for t in tables:
        singular = check_spcj_singular(t, 0, 1).holds
        general = check_spcj_general(t, X, Y).holds
        oracle = oracle_check(t, SpCj(X, Y)).holds
        assert singular == general == oracle


def test_cj_witness_replays(cj_five):
    sub = cj_five.with_rows_removed({0})
    verdict = check_spcj_general(sub, X, Y)
    assert verdict.holds
    assert holds_cj(verdict.witness.rows, X, Y)


def test_cj_five_measures(cj_five):
    # The 1-removal repair: dropping the (1,1) row shrinks the CourseID
    # domain to {2,3} and the remaining four rows cross fully.
    res3 = g3_spcj(cj_five, X, Y)
    assert res3.fraction_str == "1/5"
    assert res3.removed_rows == (0,)
    assert g5_spcj(cj_five, X, Y).fraction_str == "1/5"


def test_cj_four_measures(cj_four):
    assert g3_spcj(cj_four, X, Y).fraction_str == "1/4"
    assert g5_spcj(cj_four, X, Y).fraction_str == "2/4"


def test_cj_g5_can_exceed_one():
    t = table(["A", "B"], [("1", "1"), ("2", "2"), ("3", "3")])
    res = g5_spcj(t, X, Y)
    assert res.fraction_str == "6/3"
    assert res.ratio == Fraction(2)
    assert all(row == (None, None) for row in res.added_rows)


def test_cj_g3_greater_than_g5_instance():
    t = table(
        ["A", "B"],
        [("1", "1"), ("1", "1"), ("1", "2"), ("1", "2"),
         ("1", "3"), ("1", "3"), ("2", None), ("2", None)],
    )
    g3 = g3_spcj(t, X, Y)
    g5 = g5_spcj(t, X, Y)
    assert g3.fraction_str == "2/8" and g5.fraction_str == "1/8"
    assert g3.ratio > g5.ratio


def test_cj_equal_measures_instance(mvd_trio):
    # Cross join between the last two columns of the three-row table.
    three = mvd_trio[2]
    lhs, rhs = frozenset({1}), frozenset({2})
    assert g3_spcj(three, lhs, rhs).ratio == g5_spcj(three, lhs, rhs).ratio == Fraction(1, 3)


def test_cj_overlap_sides():
    t = table(["A", "B"], [("1", "1"), ("2", "2")])
    overlap = frozenset({0})
    assert not check_spcj_general(t, overlap, overlap).holds
    single = table(["A", "B"], [("1", "1"), ("1", "2")])
    assert check_spcj_general(single, overlap, overlap).holds
    res = g5_spcj(t, overlap, overlap)
    assert res.numerator is None  # additions cannot merge two total values


def test_single_tuple_cj():
    t = table(["A", "B", "C"], [("1", None, "2")])
    assert check_spcj_general(t, frozenset({0, 1}), frozenset({2})).holds


def test_decomposition_regression():
    # The dependency holds yet joining the two projections of the
    # incomplete table inflates the bag; no decomposition is offered.
    t = table(["X", "Y", "Z"], [("1", "1", "1"), ("1", None, "2")])
    assert check_spmvd(t, X, Y).holds
    xy = project(t, frozenset({0, 1}))
    xz = project(t, frozenset({0, 2}))
    joined = [
        (r1[0], r1[1], r2[1])
        for r1 in xy.rows
        for r2 in xz.rows
        if r1[0] == r2[0]
    ]
    assert len(joined) != t.row_count


def test_budget_error(mvd_trio):
    with pytest.raises(BudgetExceededError):
        check_spmvd(mvd_trio[0], frozenset({0, 1, 2, 3}), frozenset({4}), budget=2)
