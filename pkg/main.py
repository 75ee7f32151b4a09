"""
Command-line entry point.

    main.py run "SELECT i FROM test WHERE i<20" --backend jit --db data.qjdb
    main.py explain "SELECT i FROM test WHERE i<20"
    main.py make-data --rows 1000000 --seed 1 --range 0:1000000 --out data.qjdb
    main.py exp-a --db data.qjdb --out exp_a.csv
    main.py exp-b --db data.qjdb --out exp_b.csv
    main.py exp-c --db data.qjdb --out exp_c.csv
    main.py templates --out build/templates --docs opcodes.md
    main.py report exp_a.csv

Rows and CSV go to stdout (or --out); statistics and diagnostics go to
stderr. Errors exit with status 1, usage errors with status 2.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from backends.protocol import CollectingSink, CountingSink
from backends.run import BACKEND_NAMES, Backend, run_backend
from bench.experiments import (DEFAULT_RUNS, EXP_A_OP_COUNTS, EXP_B_SELECTIVITIES, EXP_B_TARGET_LOOP_OPS, Bench,
                               plan_query, run_experiment_a, run_experiment_b, run_experiment_c)
from bench.records import write_records
from bench.report import report
from errors import QjitError
from extractor.library import build_template_library, emit_template_library, load_template_library
from extractor.source import load_semantics
from jit.config import JitConfig, parse_threshold
from semantics import SEMANTICS_PATH
from storage.csv_import import import_csv
from storage.fileformat import save_table
from storage.generate import DEFAULT_ROWS, generate_mixed_table, generate_table
from storage.schema import ColumnDef, ColumnType, TableSchema
from table import display_program, display_records, display_report, display_stats
from utils import format_row, open_database, parse_fraction_list, parse_int_list, parse_range, setup_logging
from vm.opcodes import describe_opcodes

logger = logging.getLogger("main")


def jit_config(args) -> JitConfig:
    return JitConfig.from_env(threshold=args.threshold, opt_level=args.opt,
                              keep_artifacts=True if args.keep_artifacts else None)


def template_library(args):
    if not args.templates:
        return None
    expected = load_semantics(SEMANTICS_PATH).sha256
    return load_template_library(args.templates, expected_sha256=expected)


def cmd_run(args) -> int:
    db = open_database(args.db, args.rows, args.seed, args.mixed, args.value_range)
    program = plan_query(db, args.query)
    sink = CountingSink() if args.count else CollectingSink()
    stats = run_backend(args.backend, program, db, sink, jit_config(args), template_library(args),
                        count_instructions=args.instructions)
    if args.count:
        print(sink.count)
    else:
        for row in sink.rows:
            print(format_row(row))
    if args.stats_json:
        payload = stats.to_dict()
        payload["rows_out"] = payload.pop("rows_emitted")
        Path(args.stats_json).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    else:
        display_stats(stats, Backend(args.backend).value)
    return 0


def cmd_explain(args) -> int:
    db = open_database(args.db, args.rows, args.seed, value_range=args.value_range)
    display_program(plan_query(db, args.query))
    return 0


def make_bench(args) -> Bench:
    db = open_database(args.db, args.rows, args.seed, getattr(args, "mixed", False), args.value_range)
    return Bench(db=db, runs=args.runs, config=jit_config(args), fresh_process=args.fresh_process,
                 db_path=args.db, library=template_library(args))


def emit_records(records, args) -> None:
    display_records(records)
    if args.out:
        write_records(records, args.out)
        logger.info("Wrote %d records to %s", len(records), args.out)
    else:
        write_records(records, sys.stdout)


def cmd_exp_a(args) -> int:
    emit_records(run_experiment_a(make_bench(args), args.ops), args)
    return 0


def cmd_exp_b(args) -> int:
    emit_records(run_experiment_b(make_bench(args), args.selectivities, args.loop_ops), args)
    return 0


def cmd_exp_c(args) -> int:
    emit_records(run_experiment_c(make_bench(args), args.ops), args)
    return 0


def cmd_make_data(args) -> int:
    if args.csv:
        column_type = ColumnType.ANY if args.mixed else ColumnType.INT
        table = import_csv(args.csv, TableSchema("test", (ColumnDef("i", column_type),)))
    elif args.mixed:
        table = generate_mixed_table(args.rows, args.seed, args.text_fraction)
    else:
        table = generate_table(args.rows, args.seed, args.value_range)
    save_table(table, args.out)
    print(f"Wrote {len(table.rows)} rows to {args.out}")
    return 0


def cmd_templates(args) -> int:
    library = build_template_library(args.semantics, specialize=args.specialize)
    if args.out:
        written = emit_template_library(library, args.out)
        print(f"Wrote {len(written)} files to {args.out}")
    else:
        for template in [*library.groups, *library.specialized_groups]:
            print(template.text)
            print()
    if args.docs:
        Path(args.docs).write_text(describe_opcodes(), encoding="utf-8")
        print(f"Wrote opcode reference to {args.docs}")
    return 0


def cmd_report(args) -> int:
    display_report(report(args.csv))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument("--backend", choices=BACKEND_NAMES, default="switch", help="execution backend")
    common.add_argument("--threshold", type=parse_threshold, default=None,
                        help="backward jumps before a loop is compiled ('inf' disables the JIT)")
    common.add_argument("--opt", choices=("0", "1", "2"), default=None, help="bytecode optimisation level")
    common.add_argument("--runs", type=int, default=DEFAULT_RUNS, help="measurements averaged per point")
    common.add_argument("--seed", type=int, default=1, help="seed of generated tables")
    common.add_argument("--rows", type=int, default=DEFAULT_ROWS, help="rows of generated tables")
    common.add_argument("--range", dest="value_range", type=parse_range, default=None, metavar="LO:HI",
                        help="half-open value range of generated tables (default 0:rows)")
    common.add_argument("--db", type=Path, default=None, help="QJDB table file (generated when absent)")
    common.add_argument("--fresh-process", action="store_true", help="measure each run in a new process")
    common.add_argument("--stats-json", default=None, help="write run statistics as JSON to this path")
    common.add_argument("--out", type=Path, default=None, help="output file")
    common.add_argument("--templates", type=Path, default=None, help="load templates written by 'templates'")
    common.add_argument("--keep-artifacts", action="store_true", help="keep emitted region sources")

    parser = argparse.ArgumentParser(prog="main.py", description="Bytecode query engine with a template JIT")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="run a query and print its rows")
    run.add_argument("query")
    run.add_argument("--count", action="store_true", help="print only the number of rows")
    run.add_argument("--instructions", action="store_true", help="count retired instructions")
    run.add_argument("--mixed", action="store_true", help="generate a mixed Int/Text table")
    run.set_defaults(handler=cmd_run)

    explain = commands.add_parser("explain", parents=[common], help="print the program of a query")
    explain.add_argument("query")
    explain.set_defaults(handler=cmd_explain)

    exp_a = commands.add_parser("exp-a", parents=[common], help="loop length sweep")
    exp_a.add_argument("--ops", type=parse_int_list, default=list(EXP_A_OP_COUNTS), help="loop op counts")
    exp_a.set_defaults(handler=cmd_exp_a)

    exp_b = commands.add_parser("exp-b", parents=[common], help="selectivity sweep")
    exp_b.add_argument("--selectivities", type=parse_fraction_list, default=list(EXP_B_SELECTIVITIES))
    exp_b.add_argument("--loop-ops", type=int, default=EXP_B_TARGET_LOOP_OPS, help="target loop length")
    exp_b.set_defaults(handler=cmd_exp_b)

    exp_c = commands.add_parser("exp-c", parents=[common], help="specialized comparisons")
    exp_c.add_argument("--ops", type=parse_int_list, default=list(EXP_A_OP_COUNTS), help="loop op counts")
    exp_c.add_argument("--mixed", action="store_true", help="run on a mixed Int/Text table")
    exp_c.set_defaults(handler=cmd_exp_c)

    make_data = commands.add_parser("make-data", parents=[common], help="write a table file")
    make_data.add_argument("--csv", type=Path, default=None, help="import this CSV instead of generating")
    make_data.add_argument("--mixed", action="store_true", help="Any-typed column mixing Int and Text")
    make_data.add_argument("--text-fraction", type=float, default=0.1)
    make_data.set_defaults(handler=cmd_make_data)

    templates = commands.add_parser("templates", parents=[common], help="extract opcode templates")
    templates.add_argument("--semantics", type=Path, default=SEMANTICS_PATH, help="semantics source")
    templates.add_argument("--specialize", dest="specialize", action="store_true", default=True,
                           help="emit the integer-only comparison variants (default)")
    templates.add_argument("--no-specialize", dest="specialize", action="store_false",
                           help="skip the integer-only comparison variants")
    templates.add_argument("--docs", type=Path, default=None, help="write the opcode reference here")
    templates.set_defaults(handler=cmd_templates)

    report_cmd = commands.add_parser("report", parents=[common], help="summarize an experiment CSV")
    report_cmd.add_argument("csv", type=Path)
    report_cmd.set_defaults(handler=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    if args.command == "make-data" and args.out is None:
        parser.error("make-data requires --out")
    try:
        return args.handler(args)
    except (QjitError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
