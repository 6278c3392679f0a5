"""Data model for incomplete tables under bag semantics.

Cells are opaque string tokens or NULL (represented by ``None``). Tables
are immutable after construction; every predicate here is pure, so
concurrent readers need no locking. Duplicate rows are permitted and kept
distinct by row index.

The reserved symbol ``SSYMB`` stands in for the active domain of a column
that contains only NULLs. It is a process-wide sentinel distinct from
every ingested token and only ever appears in completed worlds, never in
an :class:`IncompleteTable`.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator

AttributeSet = frozenset[int]


class _Ssymb:
    """Reserved degenerate-domain symbol; compares by identity only."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "ssymb"


SSYMB = _Ssymb()

# A cell is a value token, the reserved symbol, or NULL (None).
Cell = "str | _Ssymb | None"
Row = tuple


def cell_sort_key(value) -> tuple:
    """Deterministic total order on cell values: tokens lexicographically,
    the reserved symbol after all tokens."""
    if value is SSYMB:
        return (1, "")
    return (0, value)


@dataclass(frozen=True)
class Schema:
    """Ordered attribute names; column index equals position."""

    attributes: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("attribute names must be unique")
        if any(not a for a in self.attributes):
            raise ValueError("attribute names must be non-empty")

    @property
    def arity(self) -> int:
        return len(self.attributes)

    def position(self, name: str) -> int:
        try:
            return self.attributes.index(name)
        except ValueError:
            raise KeyError(f"unknown attribute {name!r}") from None

    def positions(self, names: Iterable[str]) -> AttributeSet:
        return frozenset(self.position(n) for n in names)

    def names(self, positions: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.attributes[p] for p in sorted(positions))


@dataclass(frozen=True)
class ActiveDomain:
    """Distinct non-NULL values of one column, never empty.

    ``degenerate`` is set when the raw value set was empty and the
    reserved symbol was injected instead.
    """

    attribute: int
    values: frozenset
    degenerate: bool
    sorted_values: tuple = field(compare=False)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class IncompleteTable:
    """Bag of tuples over a named schema; cells are tokens or None."""

    schema: Schema
    rows: tuple[Row, ...]
    null_token: str = ""

    def __post_init__(self):
        arity = self.schema.arity
        for i, row in enumerate(self.rows):
            if len(row) != arity:
                raise ValueError(
                    f"row {i} has {len(row)} cells, schema arity is {arity}"
                )

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def build(attributes: Iterable[str], rows: Iterable[Iterable], null_token: str = "") -> "IncompleteTable":
        """Build a table from attribute names and row iterables.

        Cells equal to ``None`` stay NULL; every other cell is interned as
        a string token verbatim.
        """
        schema = Schema(tuple(attributes))
        packed = tuple(
            tuple(None if c is None else sys.intern(str(c)) for c in row)
            for row in rows
        )
        return IncompleteTable(schema, packed, null_token)

    # -- basic shape -----------------------------------------------------------

    @property
    def arity(self) -> int:
        return self.schema.arity

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def all_positions(self) -> AttributeSet:
        return frozenset(range(self.arity))

    # -- active domains ----------------------------------------------------

    def active_domain(self, a: int) -> ActiveDomain:
        """Distinct non-NULL values in column ``a``; the reserved symbol
        when the column holds only NULLs."""
        if not 0 <= a < self.arity:
            raise IndexError(f"attribute index {a} out of range for arity {self.arity}")
        return self.active_domains()[a]

    def active_domains(self) -> tuple[ActiveDomain, ...]:
        cached = self.__dict__.get("_domains")
        if cached is None:
            domains = []
            for a in range(self.arity):
                values = {row[a] for row in self.rows if row[a] is not None}
                if values:
                    domains.append(
                        ActiveDomain(a, frozenset(values), False,
                                     tuple(sorted(values, key=cell_sort_key)))
                    )
                else:
                    domains.append(
                        ActiveDomain(a, frozenset([SSYMB]), True, (SSYMB,))
                    )
            cached = tuple(domains)
            object.__setattr__(self, "_domains", cached)
        return cached

    # -- derived tables ------------------------------------------------------

    def with_rows_removed(self, indices: Iterable[int]) -> "IncompleteTable":
        drop = set(indices)
        kept = tuple(r for i, r in enumerate(self.rows) if i not in drop)
        return IncompleteTable(self.schema, kept, self.null_token)

    def with_rows_added(self, new_rows: Iterable[Row]) -> "IncompleteTable":
        return IncompleteTable(self.schema, self.rows + tuple(new_rows), self.null_token)


def weakly_similar(t1: Row, t2: Row, x: AttributeSet) -> bool:
    """True iff on every position in ``x`` the cells are equal or at least
    one of them is NULL."""
    for a in x:
        v1, v2 = t1[a], t2[a]
        if v1 is None or v2 is None:
            continue
        if v1 != v2:
            return False
    return True


def strongly_similar(t1: Row, t2: Row, x: AttributeSet) -> bool:
    """True iff every position in ``x`` holds equal non-NULL values."""
    for a in x:
        v1 = t1[a]
        if v1 is None or v1 != t2[a]:
            return False
    return True


def is_total(t: Row, x: AttributeSet) -> bool:
    """True iff no cell of ``t`` in ``x`` is NULL."""
    return all(t[a] is not None for a in x)


def project(table: IncompleteTable, x: AttributeSet) -> IncompleteTable:
    """Restrict every tuple to the positions in ``x`` (kept in schema
    order); duplicates preserved, row count unchanged."""
    positions = sorted(x)
    for a in positions:
        if not 0 <= a < table.arity:
            raise IndexError(f"attribute index {a} out of range")
    names = tuple(table.schema.attributes[a] for a in positions)
    rows = tuple(tuple(row[a] for a in positions) for row in table.rows)
    return IncompleteTable(Schema(names), rows, table.null_token)


def projection(row: Row, positions: Iterable[int]) -> tuple:
    """Row restricted to sorted ``positions`` as a plain tuple."""
    return tuple(row[a] for a in sorted(positions))


def extension_options(table: IncompleteTable, row: Row, positions: Iterable[int]) -> list[tuple]:
    """Per-position completion options for ``row`` on sorted ``positions``:
    the cell itself when non-NULL, else the column's active domain."""
    domains = table.active_domains()
    options = []
    for a in sorted(positions):
        cell = row[a]
        options.append((cell,) if cell is not None else domains[a].sorted_values)
    return options


def extension_count(table: IncompleteTable, row: Row, positions: Iterable[int]) -> int:
    """Number of distinct completions of ``row`` on ``positions``."""
    domains = table.active_domains()
    count = 1
    for a in positions:
        if row[a] is None:
            count *= len(domains[a].sorted_values)
    return count


def iter_extensions(table: IncompleteTable, row: Row, positions: Iterable[int]) -> Iterator[tuple]:
    """Distinct completions of ``row`` on sorted ``positions`` in
    lexicographic order of the per-column option lists."""
    return product(*extension_options(table, row, positions))


def fresh_values(table: IncompleteTable, k: int, stem: str = "z") -> list[str]:
    """``k`` tokens outside every active domain of ``table``.

    Deterministic: a monotone counter under a stem that is escalated
    until no candidate collides with an ingested token.
    """
    used = set()
    for d in table.active_domains():
        used |= d.values
    prefix = stem
    while any(f"{prefix}{i}" in used for i in range(1, k + 1)):
        prefix = "z" + prefix
    return [sys.intern(f"{prefix}{i}") for i in range(1, k + 1)]
