"""Exact spFD satisfaction check and the g3/g5 measures for spFDs.

Checking an spFD is NP-complete in general, so the check is a
backtracking search over per-tuple left-side completions: tuples imputed
to the same left-side value form a class, and a class is feasible iff on
every right-side attribute its members' non-NULL cells agree (free cells
can always copy the class value or, failing that, any active-domain
value). The search is exact within a node budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import BudgetExceededError, PreconditionError
from .oracle import ConstraintVerdict, MeasureResult, SpWorld, lexmin_world
from .table import (
    AttributeSet,
    IncompleteTable,
    Row,
    fresh_values,
    is_total,
    projection,
)

DEFAULT_NODE_BUDGET = 10_000_000

# Degeneracy cases and slot enumeration in the removal lower bound are
# skipped above these sizes; the bound is only ever used to prune.
_BOUND_MAX_LHS = 12
_BOUND_MAX_SLOTS = 4096


def normalize_fd(lhs: AttributeSet, rhs: AttributeSet) -> tuple[AttributeSet, AttributeSet]:
    """Disjointify: X -> Y holds iff X\\Y -> Y\\X holds."""
    return lhs - rhs, rhs - lhs


def _row_key(row: Row, cols: tuple[int, ...]) -> tuple:
    return tuple((1, "") if row[a] is None else (0, row[a]) for a in cols)


class _FdSearch:
    """Backtracking assignment of left-side extensions to rows."""

    def __init__(self, table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
                 budget: int):
        self.table = table
        self.x_cols = tuple(sorted(lhs))
        self.y_cols = tuple(sorted(rhs))
        self.budget = budget
        self.nodes = 0
        domains = table.active_domains()
        self.x_options: list[tuple[tuple, ...]] = []
        for row in table.rows:
            opts = tuple(
                product(*(
                    (row[a],) if row[a] is not None else domains[a].sorted_values
                    for a in self.x_cols
                ))
            )
            self.x_options.append(opts)
        xy = self.x_cols + self.y_cols
        order_key = lambda i: (len(self.x_options[i]), _row_key(table.rows[i], xy), i)
        self.order = sorted(range(table.row_count), key=order_key)
        self.same_as_prev = [False] * len(self.order)
        for pos in range(1, len(self.order)):
            i, j = self.order[pos - 1], self.order[pos]
            self.same_as_prev[pos] = (
                projection(table.rows[i], xy) == projection(table.rows[j], xy)
            )
        # class value -> [member count, per-y-attribute fixed cell or None]
        self.classes: dict = {}
        self.assignment: dict = {}
        self.choice_index: list[int] = [0] * table.row_count

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(
                f"spFD search exceeded the node budget of {self.budget}"
            )

    def _slot_space(self, extra_per_column: int = 0) -> int:
        """Size of the left-side completion space, capped at |T| + 1.

        ``extra_per_column`` accounts for the reserved symbol becoming
        available when removals empty out a column.
        """
        cap = self.table.row_count + 1
        slots = 1
        for a in self.x_cols:
            dom = self.table.active_domains()[a]
            width = len(dom.sorted_values)
            if extra_per_column and not dom.degenerate:
                width += extra_per_column
            slots *= width
            if slots >= cap:
                return cap
        return slots

    def _greedy_conflict_clique(self) -> int:
        """Rows pairwise conflicting on the right side must take pairwise
        distinct class values; any such clique lower-bounds the number of
        distinct left-side completions needed."""
        rows = self.table.rows
        clique: list[int] = []
        for i in range(len(rows)):
            if all(self._y_conflict(rows[i], rows[j]) for j in clique):
                clique.append(i)
        return len(clique)

    def _y_conflict(self, r1: Row, r2: Row) -> bool:
        for a in self.y_cols:
            v1, v2 = r1[a], r2[a]
            if v1 is not None and v2 is not None and v1 != v2:
                return True
        return False

    def _join(self, value: tuple, row: Row):
        """Add ``row`` to the class of ``value``; returns an undo token or
        None when the class would become infeasible."""
        state = self.classes.get(value)
        if state is None:
            fixed = [row[a] for a in self.y_cols]
            self.classes[value] = [1, fixed]
            return ("new", value)
        count, fixed = state
        touched = []
        for pos, a in enumerate(self.y_cols):
            cell = row[a]
            if cell is None:
                continue
            if fixed[pos] is None:
                fixed[pos] = cell
                touched.append(pos)
            elif fixed[pos] != cell:
                for p in touched:
                    fixed[p] = None
                return None
        state[0] = count + 1
        return ("old", value, touched)

    def _unjoin(self, token) -> None:
        if token[0] == "new":
            del self.classes[token[1]]
        else:
            _, value, touched = token
            state = self.classes[value]
            state[0] -= 1
            for p in touched:
                state[1][p] = None

    def solve(self) -> bool:
        if self._greedy_conflict_clique() > self._slot_space():
            return False
        return self._descend(0)

    def _descend(self, pos: int) -> bool:
        if pos == len(self.order):
            return True
        self._tick()
        i = self.order[pos]
        start = self.choice_index[self.order[pos - 1]] if self.same_as_prev[pos] else 0
        options = self.x_options[i]
        for idx in range(start, len(options)):
            value = options[idx]
            token = self._join(value, self.table.rows[i])
            if token is None:
                continue
            self.assignment[i] = value
            self.choice_index[i] = idx
            if self._descend(pos + 1):
                return True
            del self.assignment[i]
            self._unjoin(token)
        return False

    def witness_world(self) -> SpWorld:
        domains = self.table.active_domains()
        rows = []
        for i, row in enumerate(self.table.rows):
            cells = list(row)
            value = self.assignment[i]
            for pos, a in enumerate(self.x_cols):
                cells[a] = value[pos]
            fixed = self.classes[value][1]
            for pos, a in enumerate(self.y_cols):
                if cells[a] is None:
                    cells[a] = fixed[pos] if fixed[pos] is not None else domains[a].sorted_values[0]
            for a, cell in enumerate(cells):
                if cell is None:
                    cells[a] = domains[a].sorted_values[0]
            rows.append(tuple(cells))
        return SpWorld(tuple(rows), tuple(range(self.table.row_count)))


def check_spfd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
               budget: int = DEFAULT_NODE_BUDGET) -> ConstraintVerdict:
    """Holds iff some strongly possible world satisfies the functional
    dependency; exact backtracking, complete within the budget."""
    x, y = normalize_fd(lhs, rhs)
    if not y or table.row_count == 0:
        # Reflexive dependency: any world works, e.g. the smallest one.
        return ConstraintVerdict(True, lexmin_world(table))
    search = _FdSearch(table, x, y, budget)
    if search.solve():
        return ConstraintVerdict(True, search.witness_world())
    return ConstraintVerdict(False)


def total_part_satisfies_fd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet) -> bool:
    """Whether the left-side-total rows admit a common imputation, i.e.
    no two of them disagree on a right-side attribute within a class."""
    x, y = normalize_fd(lhs, rhs)
    classes: dict = {}
    for row in table.rows:
        if not is_total(row, x):
            continue
        value = projection(row, x)
        fixed = classes.setdefault(value, [None] * len(y))
        for pos, a in enumerate(sorted(y)):
            cell = row[a]
            if cell is None:
                continue
            if fixed[pos] is None:
                fixed[pos] = cell
            elif fixed[pos] != cell:
                return False
    return True


def _removal_lower_bound(table: IncompleteTable, x_cols: tuple[int, ...],
                         y_cols: tuple[int, ...]) -> int:
    """Admissible lower bound on the size of any valid removal set.

    Relaxation: class values are drawn from the original active domains
    and kept rows need not provide them. Columns allowed to go degenerate
    are case-split, because the reserved symbol only becomes available
    for a column that is entirely NULL after removal, and rows with a
    value there are forcibly removed in that case.
    """
    n = table.row_count
    if len(x_cols) > _BOUND_MAX_LHS:
        return 0
    domains = table.active_domains()
    best_cover = 0
    for mask in range(1 << len(x_cols)):
        degen = {x_cols[b] for b in range(len(x_cols)) if mask >> b & 1}
        allowed = [r for r in table.rows if all(r[a] is None for a in degen)]
        feasible = all(
            domains[a].degenerate or any(r[a] is not None for r in allowed)
            for a in x_cols
            if a not in degen
        )
        if not feasible:
            continue
        slot_options = []
        size = 1
        for a in x_cols:
            opts = (None,) if a in degen else domains[a].sorted_values
            slot_options.append(opts)
            size *= len(opts)
        if size > _BOUND_MAX_SLOTS:
            best_cover = max(best_cover, len(allowed))
            continue
        total = 0
        for slot in product(*slot_options):
            compatible = [
                r for r in allowed
                if all(r[a] is None or s is None or r[a] == s
                       for a, s in zip(x_cols, slot))
            ]
            if not compatible:
                continue
            per_slot = len(compatible)
            for a in y_cols:
                counts: dict = {}
                free = 0
                for r in compatible:
                    if r[a] is None:
                        free += 1
                    else:
                        counts[r[a]] = counts.get(r[a], 0) + 1
                per_slot = min(per_slot, (max(counts.values()) if counts else 0) + free)
            total += per_slot
            if total >= len(allowed):
                total = len(allowed)
                break
        best_cover = max(best_cover, min(total, len(allowed)))
        if best_cover == n:
            break
    return n - best_cover


class _FdRemovalSearch(_FdSearch):
    """Assign-or-remove depth-first search with a removal budget.

    The incremental class state is a relaxation (it draws values from the
    original active domains, which removal may shrink), so every complete
    leaf is re-verified against the actual sub-table before it counts.
    """

    def __init__(self, table, lhs, rhs, budget):
        super().__init__(table, lhs, rhs, budget)
        self.removed: list[int] = []
        self.limit = 0
        self.leaf_verdict: ConstraintVerdict | None = None

    def solve_with_removals(self, limit: int) -> bool:
        self.limit = limit
        self.classes.clear()
        self.assignment.clear()
        self.removed.clear()
        self.leaf_verdict = None
        return self._descend_r(0)

    def _descend_r(self, pos: int) -> bool:
        if pos == len(self.order):
            if not self.removed:
                self.leaf_verdict = ConstraintVerdict(True, self.witness_world())
                return True
            sub = self.table.with_rows_removed(self.removed)
            verdict = check_spfd(
                sub, frozenset(self.x_cols), frozenset(self.y_cols), self.budget
            )
            if verdict.holds:
                self.leaf_verdict = verdict
                return True
            return False
        self._tick()
        i = self.order[pos]
        prev = self.order[pos - 1] if pos else None
        prev_removed = self.same_as_prev[pos] and prev in self.removed
        if not prev_removed:
            start = self.choice_index[prev] if self.same_as_prev[pos] else 0
            options = self.x_options[i]
            for idx in range(start, len(options)):
                value = options[idx]
                token = self._join(value, self.table.rows[i])
                if token is None:
                    continue
                self.assignment[i] = value
                self.choice_index[i] = idx
                if self._descend_r(pos + 1):
                    return True
                del self.assignment[i]
                self._unjoin(token)
        if len(self.removed) < self.limit:
            self.removed.append(i)
            if self._descend_r(pos + 1):
                return True
            self.removed.pop()
        return False


def g3_spfd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
            budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    """Minimum removal ratio by iterative deepening on the removal count.

    Unlike keys, minimum removal sets may contain left-side-total rows,
    so every row is in scope. Levels below the admissible lower bound are
    skipped rather than searched.
    """
    n = table.row_count
    if n == 0:
        raise ValueError("g3 is undefined for an empty table")
    x, y = normalize_fd(lhs, rhs)
    if not y:
        verdict = check_spfd(table, lhs, rhs, budget)
        return MeasureResult("g3", 0, n, removed_rows=(), witness=verdict.witness)
    search = _FdRemovalSearch(table, x, y, budget)
    floor = _removal_lower_bound(table, search.x_cols, search.y_cols)
    clique_floor = search._greedy_conflict_clique() - search._slot_space(extra_per_column=1)
    for m in range(max(floor, clique_floor, 0), n + 1):
        if search.solve_with_removals(m):
            removed = tuple(sorted(search.removed))
            kept = tuple(i for i in range(n) if i not in search.removed)
            witness = SpWorld(search.leaf_verdict.witness.rows, kept)
            return MeasureResult("g3", len(removed), n, removed_rows=removed, witness=witness)
    raise AssertionError("unreachable: removing every row satisfies any spFD")


def g5_spfd(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
            budget: int = DEFAULT_NODE_BUDGET) -> MeasureResult:
    """Minimum number of added rows carrying a fresh left-side value.

    Each added row holds one globally new token on the (normalized) left
    side and NULL elsewhere: the fresh value gives crowded rows a class
    to escape to, and the free cells let the added row blend into any
    class it lands in. The search range comes from the removal witness:
    one row per removed non-total tuple plus one per distinct left-side
    value among removed total tuples.
    """
    if not total_part_satisfies_fd(table, lhs, rhs):
        raise PreconditionError(
            "the left-side-total part violates the dependency; additions cannot repair it"
        )
    n = table.row_count
    if n == 0:
        raise ValueError("g5 is undefined for an empty table")
    x, y = normalize_fd(lhs, rhs)
    if not y:
        return MeasureResult("g5", 0, n, added_rows=(),
                             witness=check_spfd(table, lhs, rhs, budget).witness)
    g3res = g3_spfd(table, lhs, rhs, budget)
    removed_rows = [table.rows[i] for i in g3res.removed_rows]
    nontotal = sum(1 for r in removed_rows if not is_total(r, x))
    total_classes = {projection(r, x) for r in removed_rows if is_total(r, x)}
    bound = nontotal + len(total_classes)
    tokens = fresh_values(table, max(bound, 1))
    for k in range(bound + 1):
        added = []
        for j in range(k):
            cells = [None] * table.arity
            for a in x:
                cells[a] = tokens[j]
            added.append(tuple(cells))
        extended = table.with_rows_added(added)
        verdict = check_spfd(extended, x, y, budget)
        if verdict.holds:
            origin = tuple(range(n)) + (None,) * k
            witness = SpWorld(verdict.witness.rows, origin)
            return MeasureResult("g5", k, n, added_rows=tuple(added), witness=witness)
    return MeasureResult("g5", None, n)


@dataclass(frozen=True)
class FdMeasureReport:
    lhs: AttributeSet
    rhs: AttributeSet
    holds: bool
    precondition_ok: bool
    g3: MeasureResult
    g5: MeasureResult


def spfd_report(table: IncompleteTable, lhs: AttributeSet, rhs: AttributeSet,
                budget: int = DEFAULT_NODE_BUDGET) -> FdMeasureReport:
    g3 = g3_spfd(table, lhs, rhs, budget)
    g5 = g5_spfd(table, lhs, rhs, budget)
    return FdMeasureReport(lhs, rhs, g3.numerator == 0,
                           total_part_satisfies_fd(table, lhs, rhs), g3, g5)
