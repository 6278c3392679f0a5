"""Bipartite extension graph, maximum matching, and Hall-condition
component classification.

The left class holds tuple indices, the right class the distinct complete
key projections over the active domains. The full right class is usually
exponential, so construction stops materializing a tuple's extensions at
``cap`` (default ``|T| + 1``): a tuple with more than ``|T|`` distinct
extensions can always be matched after everyone else by pigeonhole, which
is what keeps the matching check polynomial. Such tuples are recorded in
``high_degree_left`` and matched greedily from a lazy enumeration.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import UnmaterializedGraphError
from .table import (
    AttributeSet,
    IncompleteTable,
    extension_count,
    iter_extensions,
)


@dataclass(frozen=True)
class ExtensionGraph:
    table: IncompleteTable
    key: AttributeSet
    cap: int
    right_tuples: tuple[tuple, ...]
    adjacency: dict  # low-degree row index -> list of right ids, lex order
    high_degree_left: dict  # row index -> exact extension count (>= cap)

    @property
    def fully_materialized(self) -> bool:
        return not self.high_degree_left


@dataclass(frozen=True)
class MatchingResult:
    matching: dict  # row index -> extension tuple
    size: int
    covered_left: frozenset


@dataclass(frozen=True)
class Component:
    left_rows: tuple[int, ...]
    right_ids: tuple[int, ...]
    nu: int

    @property
    def satisfied(self) -> bool:
        return self.nu == len(self.left_rows)


@dataclass(frozen=True)
class ComponentPartition:
    satisfied: tuple[Component, ...]
    deficient: tuple[Component, ...]

    @property
    def satisfied_tuple_count(self) -> int:
        return sum(len(c.left_rows) for c in self.satisfied)

    @property
    def total_nu(self) -> int:
        return sum(c.nu for c in self.satisfied + self.deficient)


def build_extension_graph(table: IncompleteTable, key: AttributeSet, cap: int | None = None) -> ExtensionGraph:
    """Materialize each tuple's distinct key extensions up to ``cap``."""
    n = table.row_count
    if cap is None:
        cap = n + 1
    if cap < n + 1:
        raise ValueError(f"cap must be at least |T| + 1 = {n + 1}")
    right_ids: dict = {}
    right_tuples: list[tuple] = []
    adjacency: dict = {}
    high_degree: dict = {}
    for i, row in enumerate(table.rows):
        count = extension_count(table, row, key)
        if count >= cap:
            high_degree[i] = count
            continue
        edges = []
        for ext in iter_extensions(table, row, key):
            rid = right_ids.get(ext)
            if rid is None:
                rid = len(right_tuples)
                right_ids[ext] = rid
                right_tuples.append(ext)
            edges.append(rid)
        adjacency[i] = edges
    return ExtensionGraph(table, key, cap, tuple(right_tuples), adjacency, high_degree)


def hopcroft_karp(adjacency: list, n_right: int) -> tuple[int, list, list]:
    """Layered (shortest-augmenting-path batch) maximum matching.

    ``adjacency[u]`` lists the right neighbours of left vertex ``u``;
    vertex order is the caller's, making results reproducible. Iterative
    DFS, so deep alternating paths cannot hit the recursion limit.
    """
    n_left = len(adjacency)
    match_l: list = [None] * n_left
    match_r: list = [None] * n_right
    inf = float("inf")
    dist = [inf] * n_left
    size = 0
    while True:
        queue: deque = deque()
        for u in range(n_left):
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= found:
                continue
            for v in adjacency[u]:
                w = match_r[v]
                if w is None:
                    if found is inf:
                        found = dist[u] + 1
                elif dist[w] is inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if found is inf:
            break
        for u0 in range(n_left):
            if match_l[u0] is not None:
                continue
            # Iterative alternating DFS; frames are [vertex, iterator, edge].
            stack = [[u0, iter(adjacency[u0]), None]]
            augmented = False
            while stack:
                frame = stack[-1]
                u, it = frame[0], frame[1]
                descended = False
                for v in it:
                    w = match_r[v]
                    if w is None:
                        if dist[u] + 1 == found:
                            frame[2] = v
                            for fu, _, fv in stack:
                                match_l[fu] = fv
                                match_r[fv] = fu
                            augmented = True
                            stack.clear()
                            descended = True
                            break
                    elif dist[w] == dist[u] + 1:
                        frame[2] = v
                        stack.append([w, iter(adjacency[w]), None])
                        descended = True
                        break
                if not descended:
                    dist[u] = inf
                    stack.pop()
            if augmented:
                size += 1
    return size, match_l, match_r


def max_matching(graph: ExtensionGraph) -> MatchingResult:
    """Maximum matching over materialized vertices, then every
    high-degree tuple greedily completed with an unused extension.

    The greedy phase always succeeds: a high-degree tuple has more than
    ``|T|`` distinct extensions while at most ``|T| - 1`` others are
    occupied, so the overall size equals the maximum matching of the full
    graph.
    """
    low_rows = sorted(graph.adjacency)
    adjacency = [graph.adjacency[i] for i in low_rows]
    size, match_l, _ = hopcroft_karp(adjacency, len(graph.right_tuples))
    matching: dict = {}
    used = set()
    for pos, i in enumerate(low_rows):
        rid = match_l[pos]
        if rid is not None:
            ext = graph.right_tuples[rid]
            matching[i] = ext
            used.add(ext)
    for i in sorted(graph.high_degree_left):
        for ext in iter_extensions(graph.table, graph.table.rows[i], graph.key):
            if ext not in used:
                matching[i] = ext
                used.add(ext)
                break
        else:
            raise AssertionError("pigeonhole violated: no free extension for high-degree tuple")
    return MatchingResult(matching, len(matching), frozenset(matching))


def hall_components(graph: ExtensionGraph) -> ComponentPartition:
    """Classify connected components by whether a local matching covers
    all their tuple vertices.

    A maximum matching decomposes over components, so the global matching
    restricted to a component is locally maximum.
    """
    if not graph.fully_materialized:
        raise UnmaterializedGraphError(
            "extension graph hit the materialization cap "
            f"({graph.cap}); rebuild with a larger cap for the component partition"
        )
    result = max_matching(graph)
    n_right = len(graph.right_tuples)
    # Union-find over left rows (as-is) and right ids (offset by row count).
    parent = list(range(graph.table.row_count + n_right))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    offset = graph.table.row_count
    for i, edges in graph.adjacency.items():
        for rid in edges:
            union(i, offset + rid)
    groups: dict = {}
    for i in graph.adjacency:
        groups.setdefault(find(i), [[], []])[0].append(i)
    for rid in range(n_right):
        groups.setdefault(find(offset + rid), [[], []])[1].append(rid)
    satisfied = []
    deficient = []
    for lefts, rights in groups.values():
        if not lefts and not rights:
            continue
        nu = sum(1 for i in lefts if i in result.matching)
        component = Component(tuple(sorted(lefts)), tuple(sorted(rights)), nu)
        (satisfied if component.satisfied else deficient).append(component)
    order = lambda c: (c.left_rows, c.right_ids)
    return ComponentPartition(
        tuple(sorted(satisfied, key=order)), tuple(sorted(deficient, key=order))
    )
