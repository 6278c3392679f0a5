import itertools

import pytest

from spcheck.errors import UnmaterializedGraphError
from spcheck.matching import (
    build_extension_graph,
    hall_components,
    hopcroft_karp,
    max_matching,
)
from spcheck.table import IncompleteTable, iter_extensions

from conftest import table


def kuhn_matching_size(adjacency, n_right):
    """Independent reference matcher: plain augmenting-path search."""
    match_r = [None] * n_right

    def try_augment(u, visited):
        for v in adjacency[u]:
            if v in visited:
                continue
            visited.add(v)
            if match_r[v] is None or try_augment(match_r[v], visited):
                match_r[v] = u
                return True
        return False

    size = 0
    for u in range(len(adjacency)):
        if try_augment(u, set()):
            size += 1
    return size


def test_table4_graph_shape(table4):
    g = build_extension_graph(table4, frozenset({0, 1}))
    assert set(g.right_tuples) == {("2", "1"), ("2", "2")}
    degrees = [len(g.adjacency[i]) for i in range(4)]
    assert degrees == [1, 2, 2, 1]
    assert not g.high_degree_left


def test_total_table_graph():
    t = table(["A", "B"], [("1", "1"), ("2", "2")])
    g = build_extension_graph(t, frozenset({0, 1}))
    assert len(g.right_tuples) == 2
    assert all(len(edges) == 1 for edges in g.adjacency.values())


def test_high_degree_flagging():
    rows = [(str(i), str(i)) for i in range(1, 5)] + [(None, None)]
    t = table(["A", "B"], rows)
    g = build_extension_graph(t, frozenset({0, 1}), cap=6)
    assert g.high_degree_left == {4: 16}
    assert 4 not in g.adjacency


def test_cap_validation(table4):
    with pytest.raises(ValueError):
        build_extension_graph(table4, frozenset({0, 1}), cap=3)


def test_max_matching_table4(table4):
    result = max_matching(build_extension_graph(table4, frozenset({0, 1})))
    assert result.size == 2
    values = list(result.matching.values())
    assert len(set(values)) == len(values)


def test_max_matching_total_distinct():
    t = table(["A"], [("1",), ("2",), ("3",)])
    result = max_matching(build_extension_graph(t, frozenset({0})))
    assert result.size == 3


def test_greedy_phase_completes_high_degree():
    rows = [(str(i), str(i)) for i in range(1, 5)] + [(None, None)]
    t = table(["A", "B"], rows)
    g = build_extension_graph(t, frozenset({0, 1}), cap=6)
    result = max_matching(g)
    assert result.size == 5
    values = list(result.matching.values())
    assert len(set(values)) == len(values)
    for i, ext in result.matching.items():
        assert ext in set(iter_extensions(t, t.rows[i], frozenset({0, 1})))


def test_hall_components_table4(table4):
    parts = hall_components(build_extension_graph(table4, frozenset({0, 1})))
    assert len(parts.satisfied) == 0
    assert len(parts.deficient) == 1
    assert parts.deficient[0].nu == 2


def test_hall_components_two_satisfied():
    t = table(["A", "B"], [("1", "1"), ("2", "2")])
    parts = hall_components(build_extension_graph(t, frozenset({0, 1})))
    assert len(parts.satisfied) == 2
    assert all(c.nu == 1 for c in parts.satisfied)


def test_hall_components_mixed():
    # Three blank-competing rows next to two isolated total rows.
    t = table(
        ["A", "B"],
        [("1", "1"), ("1", "2"), ("2", None), ("2", None), ("2", None)],
    )
    parts = hall_components(build_extension_graph(t, frozenset({0, 1})))
    assert len(parts.satisfied) == 2
    assert len(parts.deficient) == 1
    assert parts.deficient[0].nu == 2
    assert parts.satisfied_tuple_count == 2


def test_hall_components_refuses_unmaterialized():
    rows = [(str(i), str(i)) for i in range(1, 5)] + [(None, None)]
    t = table(["A", "B"], rows)
    g = build_extension_graph(t, frozenset({0, 1}), cap=6)
    with pytest.raises(UnmaterializedGraphError):
        hall_components(g)


def test_component_nu_sums_to_global(table4):
    t = table(
        ["A", "B"],
        [("1", "1"), ("1", "2"), ("2", None), ("2", None), ("2", None)],
    )
    g = build_extension_graph(t, frozenset({0, 1}))
    parts = hall_components(g)
    assert parts.total_nu == max_matching(g).size


def matching_grid_tables():
    values = [None, "1", "2"]
    for width in (1, 2):
        for rows in itertools.product(
            itertools.product(values, repeat=width), repeat=3
        ):
            yield IncompleteTable.build([f"A{i}" for i in range(width)], rows)


def _assert_capped_equals_full(t):
    key = t.all_positions()
    capped = max_matching(build_extension_graph(t, key, cap=t.row_count + 1))
    full_graph = build_extension_graph(t, key, cap=10**9)
    assert not full_graph.high_degree_left
    adjacency = [full_graph.adjacency[i] for i in range(t.row_count)]
    reference = kuhn_matching_size(adjacency, len(full_graph.right_tuples))
    assert capped.size == reference


def test_capped_matching_equals_full_matching_on_grid():
    """The pigeonhole completion must reproduce the matching size of the
    fully materialized graph; checked against an independent matcher."""
    for t in matching_grid_tables():
        _assert_capped_equals_full(t)


def test_capped_matching_equals_full_matching_sampled():
    import random

    rng = random.Random(31)
    for _ in range(300):
        width = rng.randint(1, 3)
        n = rng.randint(1, 6)
        rows = [
            tuple(
                None if rng.random() < 0.3 else str(rng.randint(1, 3))
                for _ in range(width)
            )
            for _ in range(n)
        ]
        _assert_capped_equals_full(
            IncompleteTable.build([f"A{i}" for i in range(width)], rows)
        )


def test_hopcroft_karp_deterministic():
    adjacency = [[0, 1], [0], [1, 2]]
    size1, ml1, _ = hopcroft_karp(adjacency, 3)
    size2, ml2, _ = hopcroft_karp(adjacency, 3)
    assert size1 == size2 == 3
    assert ml1 == ml2


def test_wide_key_construction_matching_size():
    # The 3-row instance of the wide-key family: all three rows collapse
    # onto the all-ones extension, so exactly one can be matched and the
    # removal measure is 2/3.
    from spcheck.generators import gen_prop3
    from spcheck.spkey import g3_spkey

    inst = gen_prop3(1, 3)
    g = build_extension_graph(inst.table, inst.constraint.key)
    result = max_matching(g)
    assert result.size == 1
    assert g3_spkey(inst.table, inst.constraint.key).fraction_str == "2/3"
