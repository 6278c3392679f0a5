"""Tuple-generating constraints: spMVD, Lien's NMVD, and cross joins.

A multivalued dependency decomposes per left-side class: once every tuple
is imputed a left-side value, each class independently needs its realized
(right, rest) projections to form a full cross product. Cross joins are
the degenerate case with a single class, evaluated on the two given
attribute sets. Both reuse one backtracking cross-coverage search in
which rows that are entirely NULL on the relevant columns never branch:
they are counted and spent on missing combinations at the end, which is
what keeps the added-all-NULL-row searches tractable.

Unlike the classical complete-table case, a satisfied dependency here
does NOT license a lossless decomposition of the incomplete table into
its two projections (joining them can inflate the bag), so no
decomposition API is offered; see the regression test on the two-row
table (1,1,1), (1,NULL,2).
"""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations, product

from .errors import BudgetExceededError
from .matching import hopcroft_karp
from .oracle import ConstraintVerdict, MeasureResult, SpWorld, lexmin_world
from .table import (
    AttributeSet,
    IncompleteTable,
    fresh_values,
    is_total,
    projection,
    weakly_similar,
)

DEFAULT_NODE_BUDGET = 10_000_000


class _Budget:
    __slots__ = ("left",)

    def __init__(self, cap: int):
        self.left = cap

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("tuple-generating search exceeded its node budget")


def _row_key(row, cols) -> tuple:
    return tuple((1, "") if row[a] is None else (0, row[a]) for a in cols)


def _bag_key(rows) -> tuple:
    return tuple(sorted(rows, key=lambda r: _row_key(r, range(len(r)))))


# ---------------------------------------------------------------------------
# Cross-coverage search (shared by spCJ and the per-class spMVD check)


class _CrossSearch:
    """Can the given rows be completed so that every realized A-projection
    meets every realized B-projection in some row?

    ``rows`` are (index, row) pairs; completions draw from ``domains``
    (per-column option tuples of the enclosing table). Rows NULL on all
    relevant columns are handled by counting, not branching.
    """

    def __init__(self, rows, a_cols, b_cols, domains, budget: _Budget):
        self.a_cols = tuple(sorted(a_cols))
        self.b_cols = tuple(sorted(b_cols))
        self.cols = tuple(sorted(set(self.a_cols) | set(self.b_cols)))
        self.a_pick = tuple(self.cols.index(a) for a in self.a_cols)
        self.b_pick = tuple(self.cols.index(b) for b in self.b_cols)
        self.overlap = tuple(sorted(set(self.a_cols) & set(self.b_cols)))
        self.domains = domains
        self.budget = budget
        self.free: list[int] = []
        branching = []
        for idx, row in rows:
            if all(row[c] is None for c in self.cols):
                self.free.append(idx)
            else:
                branching.append((idx, row))
        self.n_total = len(rows)
        self.options: dict = {}
        for idx, row in branching:
            self.options[idx] = tuple(
                product(*(
                    (row[c],) if row[c] is not None else domains[c]
                    for c in self.cols
                ))
            )
        order_key = lambda item: (len(self.options[item[0]]),
                                  _row_key(item[1], self.cols), item[0])
        self.branching = sorted(branching, key=order_key)
        self.same_as_prev = [False] * len(self.branching)
        for pos in range(1, len(self.branching)):
            r1 = self.branching[pos - 1][1]
            r2 = self.branching[pos][1]
            self.same_as_prev[pos] = projection(r1, self.cols) == projection(r2, self.cols)
        self.forced_a = {
            projection(row, self.a_cols)
            for _, row in rows
            if is_total(row, frozenset(self.a_cols))
        }
        self.forced_b = {
            projection(row, self.b_cols)
            for _, row in rows
            if is_total(row, frozenset(self.b_cols))
        }
        self.assignment: dict = {}
        self.choice_index: dict = {}
        self.pairs: dict = defaultdict(int)
        self.avals: dict = defaultdict(int)
        self.bvals: dict = defaultdict(int)

    def solve(self) -> dict | None:
        """Returns index -> completion over the relevant columns, or None."""
        if not self._neighbourhoods_feasible():
            return None
        if self._descend(0):
            return self._finish()
        return None

    def _neighbourhoods_feasible(self) -> bool:
        """Every row's class must realize all forced values of the other
        side, and classmates are necessarily weakly similar to the row on
        the class side; too small a neighbourhood is an instant refusal."""
        if not self.cols or self.n_total > 500:
            return True
        blank = (None,) * (max(self.cols) + 1)
        rows = [row for _, row in self.branching] + [blank] * len(self.free)
        a_set = frozenset(self.a_cols)
        b_set = frozenset(self.b_cols)
        for r in rows:
            if len(self.forced_b) > 1:
                nbhd = sum(1 for s in rows if weakly_similar(r, s, a_set))
                if nbhd < len(self.forced_b):
                    return False
            if len(self.forced_a) > 1:
                nbhd = sum(1 for s in rows if weakly_similar(r, s, b_set))
                if nbhd < len(self.forced_a):
                    return False
        return True

    def _a_of(self, completion: tuple) -> tuple:
        return tuple(completion[i] for i in self.a_pick)

    def _b_of(self, completion: tuple) -> tuple:
        return tuple(completion[i] for i in self.b_pick)

    def _descend(self, pos: int) -> bool:
        if pos == len(self.branching):
            return self._tail_feasible()
        self.budget.tick()
        idx, row = self.branching[pos]
        start = 0
        if self.same_as_prev[pos]:
            start = self.choice_index[self.branching[pos - 1][0]]
        options = self.options[idx]
        lb_a = len(self.forced_a | set(self.avals))
        lb_b = len(self.forced_b | set(self.bvals))
        # Rows still to place can each realize at most one new combination.
        remaining = len(self.branching) - pos + len(self.free)
        if lb_a * lb_b > len(self.pairs) + remaining:
            return False
        for i in range(start, len(options)):
            completion = options[i]
            a, b = self._a_of(completion), self._b_of(completion)
            self.pairs[(a, b)] += 1
            self.avals[a] += 1
            self.bvals[b] += 1
            self.assignment[idx] = completion
            self.choice_index[idx] = i
            if self._descend(pos + 1):
                return True
            del self.assignment[idx]
            for counter, key in ((self.pairs, (a, b)), (self.avals, a), (self.bvals, b)):
                counter[key] -= 1
                if not counter[key]:
                    del counter[key]
        return False

    def _missing(self) -> list | None:
        """Uncovered (a, b) combinations, or None when some combination
        can never sit in a single row (overlapping columns disagree)."""
        missing = []
        for a, b in product(self.avals, self.bvals):
            if (a, b) in self.pairs:
                continue
            for c in self.overlap:
                if a[self.a_cols.index(c)] != b[self.b_cols.index(c)]:
                    return None
            missing.append((a, b))
        return missing

    def _tail_feasible(self) -> bool:
        if not self.avals and not self.bvals:
            return True  # only free rows, if any; they can all coincide
        missing = self._missing()
        return missing is not None and len(missing) <= len(self.free)

    def _finish(self) -> dict:
        assignment = dict(self.assignment)
        fills = []
        if self.avals or self.bvals:
            fills = self._missing()
        fallback = None
        for pos, idx in enumerate(self.free):
            if pos < len(fills):
                a, b = fills[pos]
                cells = [None] * len(self.cols)
                for i, v in zip(self.a_pick, a):
                    cells[i] = v
                for i, v in zip(self.b_pick, b):
                    cells[i] = v
                for i, c in enumerate(self.cols):
                    if cells[i] is None:
                        cells[i] = self.domains[c][0]
                assignment[idx] = tuple(cells)
            else:
                if fallback is None:
                    if assignment:
                        fallback = next(iter(assignment.values()))
                    else:
                        fallback = tuple(self.domains[c][0] for c in self.cols)
                assignment[idx] = fallback
        return assignment


def _domain_options(table: IncompleteTable) -> dict:
    return {a: d.sorted_values for a, d in enumerate(table.active_domains())}


# ---------------------------------------------------------------------------
# spMVD


def check_spmvd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
                budget: int = DEFAULT_NODE_BUDGET) -> ConstraintVerdict:
    """Holds iff some strongly possible world satisfies the classical
    multivalued dependency; the full schema matters, not just lhs + rhs."""
    n = table.row_count
    if n == 0:
        return ConstraintVerdict(True, SpWorld((), ()))
    counter = _Budget(budget)
    y_eff = rhs - lhs
    rest = table.all_positions() - lhs - rhs
    domains = _domain_options(table)
    x_cols = tuple(sorted(lhs))
    rows = table.rows
    x_options = [
        tuple(product(*((r[a],) if r[a] is not None else domains[a] for a in x_cols)))
        for r in rows
    ]
    order = sorted(range(n), key=lambda i: (len(x_options[i]), _row_key(rows[i], range(table.arity)), i))
    same = [False] * n
    for pos in range(1, n):
        same[pos] = rows[order[pos - 1]] == rows[order[pos]]
    classes: dict = defaultdict(list)
    chosen: dict = {}
    choice_index: dict = {}
    class_cache: dict = {}

    def class_assignment(members: tuple) -> dict | None:
        cached = class_cache.get(members)
        if cached is None:
            search = _CrossSearch(
                [(i, rows[i]) for i in members], y_eff, rest, domains, counter
            )
            cached = (search.solve(),)
            class_cache[members] = cached
        return cached[0]

    def descend(pos: int) -> dict | None:
        if pos == n:
            world: dict = {}
            for value, members in classes.items():
                inner = class_assignment(tuple(sorted(members)))
                if inner is None:
                    return None
                world[value] = inner
            return world
        counter.tick()
        i = order[pos]
        start = choice_index[order[pos - 1]] if same[pos] else 0
        for idx in range(start, len(x_options[i])):
            value = x_options[i][idx]
            classes[value].append(i)
            chosen[i] = value
            choice_index[i] = idx
            result = descend(pos + 1)
            if result is not None:
                return result
            classes[value].pop()
            if not classes[value]:
                del classes[value]
            del chosen[i]
        return None

    solution = descend(0)
    if solution is None:
        return ConstraintVerdict(False)
    yr_cols = tuple(sorted(y_eff | rest))
    completed = []
    for i, row in enumerate(rows):
        cells = list(row)
        value = chosen[i]
        for posn, a in enumerate(x_cols):
            cells[a] = value[posn]
        inner = solution[value][i]
        for posn, a in enumerate(yr_cols):
            cells[a] = inner[posn]
        for a, cell in enumerate(cells):
            if cell is None:
                cells[a] = domains[a][0]
        completed.append(tuple(cells))
    return ConstraintVerdict(True, SpWorld(tuple(completed), tuple(range(n))))


def check_nmvd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet) -> bool:
    """Lien's null multivalued dependency, evaluated directly on the
    incomplete table: for every two distinct lhs-total rows agreeing on
    the left side, the two swapped tuples must occur verbatim, NULLs
    matching nothing."""
    xy = lhs | rhs
    xr = lhs | (table.all_positions() - rhs)
    rows = table.rows
    totals = [i for i, r in enumerate(rows) if is_total(r, lhs)]
    for i in totals:
        for j in totals:
            if i == j:
                continue
            if projection(rows[i], lhs) != projection(rows[j], lhs):
                continue
            want_xy = projection(rows[i], xy)
            want_xr = projection(rows[j], xr)
            if None in want_xy or None in want_xr:
                return False
            if not any(
                projection(t, xy) == want_xy and projection(t, xr) == want_xr
                for t in rows
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# spCJ


def check_spcj_general(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
                       budget: int = DEFAULT_NODE_BUDGET) -> ConstraintVerdict:
    """Exact cross-join check: complete every tuple on lhs + rhs so that
    realized projections cross fully. Only those columns matter."""
    n = table.row_count
    if n == 0:
        return ConstraintVerdict(True, SpWorld((), ()))
    counter = _Budget(budget)
    domains = _domain_options(table)
    search = _CrossSearch(list(enumerate(table.rows)), lhs, rhs, domains, counter)
    assignment = search.solve()
    if assignment is None:
        return ConstraintVerdict(False)
    completed = []
    for i, row in enumerate(table.rows):
        cells = list(row)
        for posn, a in enumerate(search.cols):
            cells[a] = assignment[i][posn]
        for a, cell in enumerate(cells):
            if cell is None:
                cells[a] = domains[a][0]
        completed.append(tuple(cells))
    return ConstraintVerdict(True, SpWorld(tuple(completed), tuple(range(n))))


def check_spcj_singular(table: IncompleteTable, a: int, b: int) -> ConstraintVerdict:
    """Polynomial single-attribute case: bipartite matching between
    tuples and active-domain value pairs must cover every pair."""
    n = table.row_count
    if n == 0:
        return ConstraintVerdict(True, SpWorld((), ()))
    domains = table.active_domains()
    right = [
        (va, vb)
        for va in domains[a].sorted_values
        for vb in domains[b].sorted_values
    ]
    right_ids = {pair: i for i, pair in enumerate(right)}
    adjacency = []
    pair_cols = frozenset({a, b}) if a != b else frozenset({a})
    for row in table.rows:
        edges = []
        for pair in right:
            candidate = [None] * table.arity
            candidate[a], candidate[b] = pair
            if weakly_similar(tuple(candidate), row, pair_cols) and (a != b or pair[0] == pair[1]):
                edges.append(right_ids[pair])
        adjacency.append(edges)
    size, match_l, _ = hopcroft_karp(adjacency, len(right))
    if size < len(right):
        return ConstraintVerdict(False)
    completed = []
    for i, row in enumerate(table.rows):
        cells = list(row)
        if match_l[i] is not None:
            va, vb = right[match_l[i]]
            cells[a], cells[b] = va, vb
        for c, cell in enumerate(cells):
            if cell is None:
                cells[c] = domains[c].sorted_values[0]
        completed.append(tuple(cells))
    return ConstraintVerdict(True, SpWorld(tuple(completed), tuple(range(n))))


# ---------------------------------------------------------------------------
# Measures


def _g3_by_subset_search(table: IncompleteTable, check, budget: int) -> MeasureResult:
    n = table.row_count
    if n == 0:
        raise ValueError("g3 is undefined for an empty table")
    memo: dict = {}
    for m in range(n + 1):
        for subset in combinations(range(n), m):
            sub = table.with_rows_removed(subset)
            key = _bag_key(sub.rows)
            verdict = memo.get(key)
            if verdict is None:
                verdict = check(sub, budget)
                memo[key] = verdict
            if verdict.holds:
                kept = tuple(i for i in range(n) if i not in set(subset))
                witness = SpWorld(verdict.witness.rows, kept) if verdict.witness else None
                return MeasureResult("g3", m, n, removed_rows=subset, witness=witness)
    raise AssertionError("unreachable: the empty table satisfies every constraint")


def g3_spmvd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
             budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    return _g3_by_subset_search(
        table, lambda sub, b: check_spmvd(sub, lhs, rhs, b), budget
    )


def g3_spcj(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
            budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    return _g3_by_subset_search(
        table, lambda sub, b: check_spcj_general(sub, lhs, rhs, b), budget
    )


def _mvd_fill_need(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet) -> int:
    """Additions that certainly repair the dependency: complete every row
    minimally, then fill each class's missing cross combinations."""
    rest = table.all_positions() - lhs - rhs
    xs = tuple(sorted(lhs))
    ys = tuple(sorted(rhs - lhs))
    rs = tuple(sorted(rest))
    groups: dict = defaultdict(set)
    for r in lexmin_world(table).rows:
        groups[tuple(r[a] for a in xs)].add(
            (tuple(r[a] for a in ys), tuple(r[a] for a in rs))
        )
    need = 0
    for pairs in groups.values():
        yvals = {p[0] for p in pairs}
        rvals = {p[1] for p in pairs}
        need += len(yvals) * len(rvals) - len(pairs)
    return need


def g5_spmvd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
             budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    """Minimum additions over mixtures of all-NULL rows (combination
    fillers) and fresh-left-side rows (class escapes)."""
    n = table.row_count
    if n == 0:
        raise ValueError("g5 is undefined for an empty table")
    bound = _mvd_fill_need(table, lhs, rhs)
    arity = table.arity
    tokens = fresh_values(table, max(bound, 1))
    for k in range(bound + 1):
        for j in range(k + 1):
            added = [(None,) * arity] * (k - j)
            for t in range(j):
                cells = [None] * arity
                for a in lhs:
                    cells[a] = tokens[t]
                added.append(tuple(cells))
            extended = table.with_rows_added(added)
            verdict = check_spmvd(extended, lhs, rhs, budget)
            if verdict.holds:
                origin = tuple(range(n)) + (None,) * k
                witness = SpWorld(verdict.witness.rows, origin)
                return MeasureResult("g5", k, n, added_rows=tuple(added), witness=witness)
    return MeasureResult("g5", None, n)


def _cj_fill_need(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet) -> int | None:
    """All-NULL additions that suffice for the cross join under the
    lexicographically smallest completion; None when some required
    combination is self-contradictory on shared columns."""
    a_cols = tuple(sorted(lhs))
    b_cols = tuple(sorted(rhs))
    overlap = tuple(sorted(lhs & rhs))
    rows = lexmin_world(table).rows
    pairs = {(tuple(r[a] for a in a_cols), tuple(r[b] for b in b_cols)) for r in rows}
    avals = {p[0] for p in pairs}
    bvals = {p[1] for p in pairs}
    need = 0
    for a, b in product(avals, bvals):
        if (a, b) in pairs:
            continue
        if any(a[a_cols.index(c)] != b[b_cols.index(c)] for c in overlap):
            return None
        need += 1
    return need


def g5_spcj(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
            budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    """Minimum number of all-NULL rows making the cross join hold; may
    exceed 1. Fresh values never help here: they strictly enlarge the
    required combination set."""
    n = table.row_count
    if n == 0:
        raise ValueError("g5 is undefined for an empty table")
    bound = _cj_fill_need(table, lhs, rhs)
    if bound is None:
        domains = table.active_domains()
        space = 1
        for a in lhs | rhs:
            space *= len(domains[a].sorted_values)
        bound = space * space
        if bound > 100_000:
            raise BudgetExceededError(
                "cross-join addition bound is too large to search exhaustively"
            )
    arity = table.arity
    for k in range(bound + 1):
        added = tuple((None,) * arity for _ in range(k))
        extended = table.with_rows_added(added)
        verdict = check_spcj_general(extended, lhs, rhs, budget)
        if verdict.holds:
            origin = tuple(range(n)) + (None,) * k
            witness = SpWorld(verdict.witness.rows, origin)
            return MeasureResult("g5", k, n, added_rows=added, witness=witness)
    return MeasureResult("g5", None, n)
