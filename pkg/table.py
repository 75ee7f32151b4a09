"""
Table display utilities for programs, run statistics and benchmark results
"""

import math
import sys

from tabulate import tabulate

from backends.protocol import RunStats
from bench.records import BenchRecord
from bench.report import ReportSummary
from vm.program import Program, explain


def display_program(program: Program):
    """
    Display a program as an addr/opcode/p1/p2/p3 listing.

    Parameters:
        program: Program to display
    """
    print("\n" + "=" * 80)
    print(f"PROGRAM: {program.source_text}" if program.source_text else "PROGRAM")
    print("=" * 80)
    print(tabulate(explain(program), headers=["addr", "opcode", "p1", "p2", "p3", "comment"], tablefmt="grid"))


def display_stats(stats: RunStats, backend: str, file=None):
    data = [
        ["Backend", backend],
        ["Rows", stats.rows_emitted],
        ["Wall time (ms)", f"{stats.wall_ns / 1e6:.3f}"],
        ["CPU time (ms)", f"{stats.cpu_ns / 1e6:.3f}"],
    ]
    if stats.instructions_retired:
        data.append(["Instructions", stats.instructions_retired])
    if backend.startswith("jit"):
        data += [
            ["Compilations", stats.compilations],
            ["Compile failures", stats.compile_failures],
            ["Compilations skipped", stats.compilations_skipped],
            ["Compile time (ms)", f"{stats.compile_ns / 1e6:.3f}"],
            ["Region entries", stats.region_entries],
            ["Deopts", stats.deopts],
        ]
    if stats.aborted:
        data.append(["Aborted", "yes"])
    print(tabulate(data, headers=["Statistic", "Value"], tablefmt="grid"), file=file or sys.stderr)


def display_records(records: list[BenchRecord], file=None):
    """Display benchmark records, one row per (point, backend)."""
    rows = [
        [r.experiment, r.backend, r.loop_ops, f"{r.selectivity:.2f}", r.rows_out,
         f"{r.wall_ms:.2f}", f"{r.cpu_ms:.2f}", f"{r.compile_ms:.2f}", r.runs]
        for r in records
    ]
    headers = ["Exp", "Backend", "Loop ops", "Selectivity", "Rows", "Wall ms", "CPU ms", "Compile ms", "Runs"]
    print(tabulate(rows, headers=headers, tablefmt="grid"), file=file or sys.stderr)


def display_report(summary: ReportSummary):
    print("\n" + "=" * 80)
    print("SPEEDUP OVER SWITCH")
    print("=" * 80)
    rows = [
        [r.experiment, r.loop_ops, f"{r.selectivity:.2f}", r.backend, f"{r.cpu_ms:.2f}", f"{r.compile_ms:.2f}",
         "-" if math.isnan(r.speedup) else f"{r.speedup:.2f}x"]
        for r in summary.rows
    ]
    print(tabulate(rows, headers=["Exp", "Loop ops", "Selectivity", "Backend", "CPU ms", "Compile ms", "Speedup"],
                   tablefmt="grid"))
    print()
    for line in summary.lines():
        print(line)
