"""CSV ingestion, constraint parsing, orchestration, and reporting.

Exact rationals are the source of truth in reports; decimal fields are
derived display values. Fractions are intentionally unreduced (count over
row total), e.g. "2/4" for removing two of four rows.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import generators
from .constraints import Constraint, Nmvd, SpCj, SpFd, SpKey, SpMvd
from .errors import (
    BudgetExceededError,
    ConstraintParseError,
    PreconditionError,
    SpcheckError,
    TableLoadError,
)
from .oracle import (
    MeasureResult,
    oracle_check,
    oracle_g3,
    oracle_g5,
    world_count,
)
from .spfd import check_spfd, g3_spfd, g5_spfd
from .spkey import check_spkey, g3_spkey, g4_spkey, g5_spkey
from .table import SSYMB, IncompleteTable, Schema
from .tuplegen import (
    check_nmvd,
    check_spcj_general,
    check_spcj_singular,
    check_spmvd,
    g3_spcj,
    g3_spmvd,
    g5_spcj,
    g5_spmvd,
)

DEFAULT_BUDGET = 10_000_000
ORACLE_MAX_ROWS = 8
ORACLE_MAX_COLS = 4
ORACLE_MAX_WORLDS = 1_000_000


# ---------------------------------------------------------------------------
# Ingestion


def load_csv(path, null_token: str = "", has_header: bool = True) -> IncompleteTable:
    """Read a rectangular CSV; cells equal to ``null_token`` become NULL,
    every other cell is taken verbatim (no trimming)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            records = list(reader)
    except OSError as err:
        raise TableLoadError(f"cannot read {path}: {err}") from err
    if not records:
        raise TableLoadError(f"{path}: empty file")
    if has_header:
        header, data = records[0], records[1:]
        if len(set(header)) != len(header):
            raise TableLoadError(f"{path}: duplicate header names")
        if any(not name for name in header):
            raise TableLoadError(f"{path}: empty header name")
    else:
        width = len(records[0])
        header = [f"A{i + 1}" for i in range(width)]
        data = records
    arity = len(header)
    rows = []
    for lineno, record in enumerate(data, start=2 if has_header else 1):
        if len(record) != arity:
            raise TableLoadError(
                f"{path}: row {lineno} has {len(record)} fields, expected {arity}"
            )
        rows.append(tuple(None if cell == null_token else cell for cell in record))
    return IncompleteTable.build(header, rows, null_token)


def write_csv(table: IncompleteTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.schema.attributes)
        for row in table.rows:
            writer.writerow([table.null_token if c is None else c for c in row])


# ---------------------------------------------------------------------------
# Constraint specifications


_SPEC_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$", re.DOTALL)


def _attr_list(text: str, schema: Schema, spec: str) -> frozenset:
    names = [name.strip() for name in text.split(",")]
    if not any(names) or "" in names:
        raise ConstraintParseError(f"{spec!r}: empty attribute list")
    try:
        return schema.positions(names)
    except KeyError as err:
        raise ConstraintParseError(f"{spec!r}: {err.args[0]}") from None


def parse_constraint(spec: str, schema: Schema) -> Constraint:
    """Grammar: kind "(" attrs ( "->" | "->>" | "x" attrs )? ")".

    Whitespace-insensitive; attribute lists are comma-separated. For
    cross joins the standalone word ``x`` separates the two sides.
    """
    match = _SPEC_RE.match(spec)
    if not match:
        raise ConstraintParseError(f"{spec!r}: expected kind(...)")
    kind, body = match.group(1).lower(), match.group(2)
    if kind == "spkey":
        return SpKey(_attr_list(body, schema, spec))
    if kind in ("spmvd", "nmvd"):
        lhs, sep, rhs = body.partition("->>")
        if not sep:
            raise ConstraintParseError(f"{spec!r}: expected '->>'")
        cls = SpMvd if kind == "spmvd" else Nmvd
        return cls(_attr_list(lhs, schema, spec), _attr_list(rhs, schema, spec))
    if kind == "spfd":
        if "->>" in body:
            raise ConstraintParseError(f"{spec!r}: use spmvd for '->>'")
        lhs, sep, rhs = body.partition("->")
        if not sep:
            raise ConstraintParseError(f"{spec!r}: expected '->'")
        return SpFd(_attr_list(lhs, schema, spec), _attr_list(rhs, schema, spec))
    if kind == "spcj":
        parts = re.split(r"\bx\b", body, maxsplit=1)
        if len(parts) != 2:
            raise ConstraintParseError(f"{spec!r}: expected the separator 'x'")
        return SpCj(_attr_list(parts[0], schema, spec), _attr_list(parts[1], schema, spec))
    raise ConstraintParseError(f"{spec!r}: unknown constraint kind {kind!r}")


# ---------------------------------------------------------------------------
# Orchestration


@dataclass(frozen=True)
class RunOptions:
    measures: tuple = ("g3", "g5")
    budget: int = DEFAULT_BUDGET
    verify_with_oracle: bool = False
    oracle_max_rows: int = ORACLE_MAX_ROWS
    oracle_max_cols: int = ORACLE_MAX_COLS
    oracle_max_worlds: int = ORACLE_MAX_WORLDS
    include_witness: bool = True
    include_timing: bool = True


def _cell_json(cell):
    if cell is None:
        return None
    if cell is SSYMB:
        return "ssymb"
    return cell


def _rows_json(rows) -> list:
    return [[_cell_json(c) for c in row] for row in rows]


def _measure_json(result: MeasureResult) -> dict:
    payload = {
        "fraction": result.fraction_str,
        "decimal": None if result.ratio is None else float(result.ratio),
        "count": result.numerator,
    }
    if result.removed_rows is not None:
        payload["removed_rows"] = list(result.removed_rows)
    if result.added_rows is not None:
        payload["added_rows"] = _rows_json(result.added_rows)
    if result.witness is not None:
        payload["witness_world"] = _rows_json(result.witness.rows)
        payload["witness_origin"] = list(result.witness.origin)
    return payload


def _check(table: IncompleteTable, c: Constraint, budget: int):
    if isinstance(c, SpKey):
        return check_spkey(table, c.key)
    if isinstance(c, SpFd):
        return check_spfd(table, c.lhs, c.rhs, budget)
    if isinstance(c, SpMvd):
        return check_spmvd(table, c.lhs, c.rhs, budget)
    if isinstance(c, SpCj):
        if c.singular:
            return check_spcj_singular(table, min(c.lhs), min(c.rhs))
        return check_spcj_general(table, c.lhs, c.rhs, budget)
    if isinstance(c, Nmvd):
        from .oracle import ConstraintVerdict

        return ConstraintVerdict(check_nmvd(table, c.lhs, c.rhs))
    raise TypeError(f"unsupported constraint {type(c).__name__}")


def _measure(table: IncompleteTable, c: Constraint, name: str, budget: int) -> MeasureResult:
    if isinstance(c, SpKey):
        if name == "g3":
            return g3_spkey(table, c.key)
        if name == "g4":
            # Materialization is memory-bound, so the cap follows the
            # budget only up to a fixed ceiling per tuple.
            cap = max(table.row_count + 1, min(budget, 1_000_000))
            return g4_spkey(table, c.key, cap=cap)
        if name == "g5":
            return g5_spkey(table, c.key)
    if isinstance(c, SpFd):
        if name == "g3":
            return g3_spfd(table, c.lhs, c.rhs, budget)
        if name == "g5":
            return g5_spfd(table, c.lhs, c.rhs, budget)
    if isinstance(c, SpMvd):
        if name == "g3":
            return g3_spmvd(table, c.lhs, c.rhs, budget)
        if name == "g5":
            return g5_spmvd(table, c.lhs, c.rhs, budget)
    if isinstance(c, SpCj):
        if name == "g3":
            return g3_spcj(table, c.lhs, c.rhs, budget)
        if name == "g5":
            return g5_spcj(table, c.lhs, c.rhs, budget)
    raise SpcheckError(
        f"measure {name} is not defined for {type(c).__name__.lower()} constraints"
    )


def _oracle_fits(table: IncompleteTable, options: RunOptions) -> bool:
    return (
        table.row_count <= options.oracle_max_rows
        and table.arity <= options.oracle_max_cols
        and world_count(table) <= options.oracle_max_worlds
    )


def _oracle_block(table, c, verdict, measured, options: RunOptions) -> dict:
    if isinstance(c, Nmvd) or not _oracle_fits(table, options):
        return {"checked": False}
    block = {"checked": True}
    agree = True
    oracle_verdict = oracle_check(table, c, options.budget)
    block["holds"] = oracle_verdict.holds
    agree &= oracle_verdict.holds == verdict.holds
    for name, engine_result in measured.items():
        if name == "g4":
            continue
        oracle_fn = oracle_g3 if name == "g3" else oracle_g5
        try:
            oracle_result = oracle_fn(table, c, options.budget)
            oracle_value = oracle_result.numerator
        except BudgetExceededError:
            continue
        engine_value = None if engine_result is None else engine_result.numerator
        block[name] = "undefined" if oracle_value is None else oracle_result.fraction_str
        agree &= oracle_value == engine_value
    block["agree"] = agree
    return block


def run(table: IncompleteTable, constraints, options: RunOptions = RunOptions()) -> dict:
    """Evaluate every constraint, returning a JSON-ready report.

    Engine budget and precondition errors are recorded per constraint;
    the run continues for the remaining specifications.
    """
    report = {
        "table": {
            "rows": table.row_count,
            "attributes": list(table.schema.attributes),
        },
        "options": {
            "measures": list(options.measures),
            "budget": options.budget,
            "oracle": options.verify_with_oracle,
        },
        "constraints": [],
    }
    any_violated = False
    any_budget = False
    for c in constraints:
        spec = c.describe(table.schema)
        entry = {"spec": spec, "kind": type(c).__name__.lower()}
        started = time.perf_counter()
        measured: dict = {}
        try:
            verdict = _check(table, c, options.budget)
            entry["holds"] = verdict.holds
            any_violated |= not verdict.holds
            if options.include_witness and verdict.witness is not None:
                entry["witness_world"] = _rows_json(verdict.witness.rows)
            if verdict.violation is not None:
                entry["violation_rows"] = list(verdict.violation)
            if not isinstance(c, Nmvd):
                entry["measures"] = {}
                for name in options.measures:
                    if name == "g4" and not isinstance(c, SpKey):
                        raise SpcheckError("g4 is defined for spkey constraints only")
                    try:
                        result = _measure(table, c, name, options.budget)
                        measured[name] = result
                        entry["measures"][name] = _measure_json(result)
                    except PreconditionError as err:
                        measured[name] = None
                        entry["measures"][name] = {"error": str(err)}
            if options.verify_with_oracle:
                entry["oracle"] = _oracle_block(table, c, verdict, measured, options)
            entry["error"] = None
        except BudgetExceededError as err:
            any_budget = True
            entry["error"] = f"budget exceeded: {err}"
        except SpcheckError as err:
            entry["error"] = str(err)
        if options.include_timing:
            entry["elapsed_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
        report["constraints"].append(entry)
    report["exit_code"] = 3 if any_budget else (1 if any_violated else 0)
    return report


def _summarize(report: dict, out) -> None:
    table_info = report["table"]
    print(f"table: {table_info['rows']} rows, "
          f"{len(table_info['attributes'])} attributes", file=out)
    for entry in report["constraints"]:
        if entry.get("error") and "holds" not in entry:
            print(f"  {entry['spec']}: ERROR {entry['error']}", file=out)
            continue
        verdict = "holds" if entry["holds"] else "violated"
        line = f"  {entry['spec']}: {verdict}"
        for name, m in entry.get("measures", {}).items():
            if "error" in m:
                line += f" {name}=error({m['error']})"
            else:
                line += f" {name}={m['fraction']}"
        if "oracle" in entry and entry["oracle"].get("checked"):
            line += f" oracle={'agree' if entry['oracle']['agree'] else 'DISAGREE'}"
        if entry.get("error"):
            line += f" [{entry['error']}]"
        print(line, file=out)


# ---------------------------------------------------------------------------
# Command line


def _add_table_options(parser) -> None:
    parser.add_argument("--table", required=True, help="CSV file to check")
    parser.add_argument("--null", default="", metavar="TOKEN",
                        help="cell content that denotes NULL (default: empty)")
    parser.add_argument("--no-header", action="store_true",
                        help="CSV has no header row; attributes become A1..An")
    parser.add_argument("--constraint", action="append", required=True,
                        metavar="SPEC", help="constraint such as 'spkey(A,B)'; repeatable")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="search/enumeration budget")
    parser.add_argument("--oracle", action="store_true",
                        help="cross-check small instances against the brute-force oracle")
    parser.add_argument("--json", metavar="PATH", help="write the JSON report here")


def _cmd_table(args, measures) -> int:
    table = load_csv(args.table, args.null, not args.no_header)
    constraints = [parse_constraint(s, table.schema) for s in args.constraint]
    options = RunOptions(
        measures=measures,
        budget=args.budget,
        verify_with_oracle=args.oracle or args.verb == "verify",
    )
    report = run(table, constraints, options)
    _summarize(report, sys.stdout)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if args.verb == "verify":
        disagree = any(
            e.get("oracle", {}).get("checked") and not e["oracle"]["agree"]
            for e in report["constraints"]
        )
        unchecked = any(
            not e.get("oracle", {}).get("checked", False)
            for e in report["constraints"]
        )
        if disagree:
            print("oracle disagreement detected", file=sys.stderr)
            return 1
        if unchecked:
            print("some constraints exceeded the oracle's instance limits", file=sys.stderr)
    return report["exit_code"]


def _parse_graph(spec: str, n: int):
    edges = []
    if spec:
        for part in spec.split(","):
            u, _, v = part.partition("-")
            edges.append((int(u), int(v)))
    return generators.graph(n, edges)


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = args.construction
    if name in ("prop3", "thm1", "thm3"):
        gen = {"prop3": generators.gen_prop3, "thm1": generators.gen_thm1,
               "thm3": generators.gen_thm3}[name]
        instance = gen(args.p, args.q, args.c, verify=not args.no_verify)
    elif name == "lemma-graph":
        table = generators.graph_to_weak_similarity_table(_parse_graph(args.graph, args.n))
        instance = generators.GeneratedInstance(
            table, SpKey(frozenset(range(table.arity))), {},
            f"lemma-graph(n={args.n})")
    elif name == "maxclique":
        instance = generators.reduce_maxclique_to_spcj_g3(
            _parse_graph(args.graph, args.n), args.k, verify=not args.no_verify)
    elif name == "threecolor":
        instance = generators.reduce_3color_to_spcj_g5(
            _parse_graph(args.graph, args.n), verify=not args.no_verify)
    elif name == "threedm":
        triples = [tuple(t.split(":")) for t in args.triple or []]
        instance = generators.reduce_3dm_to_spcj(
            args.b.split(",") if args.b else [],
            args.cset.split(",") if args.cset else [],
            args.d.split(",") if args.d else [],
            triples, verify=not args.no_verify)
    elif name == "random":
        table = generators.random_table(args.rows, args.cols, args.domain,
                                        args.null_rate, args.seed)
        instance = generators.GeneratedInstance(
            table, SpKey(frozenset(range(table.arity))), {},
            f"random(rows={args.rows}, cols={args.cols}, seed={args.seed})")
    else:
        raise SpcheckError(f"unknown construction {name!r}")
    csv_path = out / f"{args.prefix}.csv"
    manifest_path = out / f"{args.prefix}.manifest.json"
    write_csv(instance.table, csv_path)
    manifest = {
        "construction": instance.provenance,
        "constraint": instance.constraint.describe(instance.table.schema),
        "expected": {
            key: (str(value) if not isinstance(value, bool) else value)
            for key, value in instance.expected.items()
        },
        "csv": csv_path.name,
        "null_token": "",
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {csv_path} and {manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spcheck",
        description="Strongly possible integrity constraints over incomplete tables",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    p_check = verbs.add_parser("check", help="evaluate constraint satisfaction")
    _add_table_options(p_check)

    p_measure = verbs.add_parser("measure", help="compute approximation measures")
    _add_table_options(p_measure)
    p_measure.add_argument("--measures", default="g3,g5",
                           help="comma list from g3,g4,g5 (default g3,g5)")

    p_verify = verbs.add_parser(
        "verify", help="measure and cross-check against the brute-force oracle")
    _add_table_options(p_verify)
    p_verify.add_argument("--measures", default="g3,g5")

    p_gen = verbs.add_parser("generate", help="materialize a named construction")
    p_gen.add_argument("construction",
                       choices=["prop3", "thm1", "thm3", "lemma-graph",
                                "maxclique", "threecolor", "threedm", "random"])
    p_gen.add_argument("--p", type=int, default=1)
    p_gen.add_argument("--q", type=int, default=2)
    p_gen.add_argument("--c", type=int, default=1)
    p_gen.add_argument("--n", type=int, default=3, help="graph vertex count")
    p_gen.add_argument("--k", type=int, default=1, help="clique size")
    p_gen.add_argument("--graph", default="", help="edges as '0-1,1-2'")
    p_gen.add_argument("--b", default="", help="3DM first element set, comma separated")
    p_gen.add_argument("--cset", default="", help="3DM second element set")
    p_gen.add_argument("--d", default="", help="3DM third element set")
    p_gen.add_argument("--triple", action="append", help="3DM triple as b:c:d")
    p_gen.add_argument("--rows", type=int, default=100)
    p_gen.add_argument("--cols", type=int, default=4)
    p_gen.add_argument("--domain", type=int, default=10)
    p_gen.add_argument("--null-rate", type=float, default=0.2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=".", help="output directory")
    p_gen.add_argument("--prefix", default="instance")
    p_gen.add_argument("--no-verify", action="store_true",
                       help="skip engine verification of expected values")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "check":
            return _cmd_table(args, measures=())
        if args.verb in ("measure", "verify"):
            measures = tuple(m for m in args.measures.split(",") if m)
            for m in measures:
                if m not in ("g3", "g4", "g5"):
                    raise SpcheckError(f"unknown measure {m!r}")
            return _cmd_table(args, measures=measures)
        if args.verb == "generate":
            return _cmd_generate(args)
        raise SpcheckError(f"unknown verb {args.verb!r}")
    except (TableLoadError, ConstraintParseError, SpcheckError) as err:
        if isinstance(err, BudgetExceededError):
            print(f"error: {err}", file=sys.stderr)
            return 3
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
