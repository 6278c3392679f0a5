"""Shared fixtures: the worked tables used across the test modules."""

import pytest

from spcheck.table import IncompleteTable


def table(attrs, rows):
    return IncompleteTable.build(attrs, rows)


@pytest.fixture
def course_table():
    return table(
        ["Course_Name", "Year", "Lecturer", "Credits", "Semester"],
        [
            ("Mathematics", "2019", None, "5", "1"),
            ("Datamining", "2018", "Sarah", "7", None),
            (None, "2019", "Sarah", None, "2"),
        ],
    )


@pytest.fixture
def table4():
    # Four rows over two columns; the canonical key-approximation example.
    return table(["X1", "X2"], [(None, "1"), ("2", None), ("2", None), ("2", "2")])


@pytest.fixture
def cars_table():
    return table(
        ["Car_Model", "Door_No", "Engine_Type"],
        [
            ("BMW", "4", None),
            ("BMW", None, "electric"),
            ("Ford", None, "V8"),
            ("Ford", None, "V6"),
        ],
    )


@pytest.fixture
def fd_six_rows():
    return table(
        ["X1", "X2", "Y"],
        [
            (None, "1", "1"),
            ("2", None, "1"),
            ("2", None, "1"),
            ("2", "1", "2"),
            ("2", "1", "2"),
            ("2", "2", "2"),
        ],
    )


@pytest.fixture
def fd_total_removal():
    return table(
        ["X1", "X2", "Y"],
        [
            ("1", None, "1"),
            ("1", None, "1"),
            ("1", "1", "2"),
            ("1", "1", None),
            ("1", "2", "3"),
        ],
    )


@pytest.fixture
def teaching_table():
    return table(
        ["Semester", "TeacherID", "CourseID"],
        [
            ("First", "1", "1"),
            (None, "1", "2"),
            ("First", "2", "3"),
            (None, "2", "4"),
            ("First", "3", "5"),
            (None, "3", "6"),
        ],
    )


@pytest.fixture
def fig1_tables():
    a = table(["X", "Y", "Z"], [("1", "1", "1"), ("1", "1", "2"), ("1", "1", None)])
    b = table(
        ["X", "Y", "Z", "V"],
        [
            ("2", "1", "1", "1"),
            ("2", "2", "1", "2"),
            ("2", "2", "1", "1"),
            ("2", "1", "1", None),
        ],
    )
    c = table(["X", "Y", "Z"], [("1", "1", "1"), ("2", "2", "2"), (None, "3", "3")])
    return a, b, c


@pytest.fixture
def mvd_trio():
    wide_x = table(
        ["X1", "X2", "X3", "X4", "Y", "Z"],
        [
            (None, "1", "1", "1", "1", "1"),
            ("1", None, "1", "1", "1", "1"),
            ("1", "1", None, "1", "2", "2"),
            ("1", "1", "1", None, "2", "3"),
        ],
    )
    wide_z = table(
        ["X", "Y", "Z1", "Z2"],
        [
            ("1", "1", "1", "1"),
            ("1", "1", "2", "1"),
            ("2", "1", "1", "1"),
            ("2", "2", "2", None),
        ],
    )
    three = table(["X", "Y", "Z"], [("1", "1", "1"), ("1", "1", "2"), ("1", "2", None)])
    return wide_x, wide_z, three


@pytest.fixture
def cj_five():
    return table(
        ["TeacherID", "CourseID"],
        [("1", "1"), ("1", "2"), ("1", "3"), ("2", None), ("2", None)],
    )


@pytest.fixture
def cj_four():
    return table(
        ["TeacherID", "CourseID"],
        [("1", "1"), ("1", "2"), ("1", "3"), ("2", None)],
    )
