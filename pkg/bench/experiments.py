"""
Benchmark experiments.

A: loop length sweep over empty-result queries (switch, threaded, jit).
B: fixed loop length, sweep of the fraction of rows that qualify.
C: loop length sweep with type-specialized comparisons (switch, jit,
   jit-specialized).

Every measurement plans the query afresh, runs it 'runs' times and
averages; in fresh-process mode each run is a separate 'main.py run'
process.
"""

import json
import logging
import os
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from backends.protocol import CountingSink, RunStats
from backends.run import Backend, run_backend
from bench.records import BenchRecord
from errors import BenchmarkMismatch
from extractor.library import TemplateLibrary
from jit.config import JitConfig
from planner.benchgen import gen_bench_query, pairs_for_loop_ops
from planner.codegen import count_loop_ops, plan
from planner.parser import parse_query
from storage.fileformat import save_table
from storage.schema import Database, Table
from vm.program import Program

logger = logging.getLogger(__name__)

DEFAULT_RUNS = 5
EXP_A_OP_COUNTS = (10, 20, 30, 40, 50, 60)
EXP_B_SELECTIVITIES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
EXP_B_TARGET_LOOP_OPS = 65

EXP_A_BACKENDS = (Backend.SWITCH, Backend.THREADED, Backend.JIT)
EXP_B_BACKENDS = (Backend.SWITCH, Backend.THREADED, Backend.JIT)
EXP_C_BACKENDS = (Backend.SWITCH, Backend.JIT, Backend.JIT_SPECIALIZED)

MAIN_SCRIPT = Path(__file__).resolve().parent.parent / "main.py"


@dataclass
class Measurement:
    rows_out: int
    wall_ms: float
    cpu_ms: float
    compile_ms: float
    runs: int


def plan_query(db: Database, text: str) -> Program:
    query = parse_query(text)
    table_id = db.table_id(query.table)
    return plan(query, db.tables[table_id].schema, table_id, text)


def bound_for_selectivity(table: Table, selectivity: float, column: int = 0) -> int:
    """
    Upper bound b such that (i<b AND i>-1) holds for about
    selectivity * len(table) rows.

    Raises:
        ValueError: If selectivity is outside [0, 1]
    """
    if not 0.0 <= selectivity <= 1.0:
        raise ValueError(f"Selectivity must be in [0, 1] (got {selectivity})")
    values = np.fromiter((row[column] for row in table.rows if type(row[column]) is int), dtype=np.int64)
    values = np.sort(values[values >= 0])
    target = min(int(round(selectivity * len(table.rows))), values.size)
    if target == 0:
        return 0
    return int(values[target - 1]) + 1


def _averaged(samples: list[RunStats], rows: list[int], label: str) -> Measurement:
    if len(set(rows)) != 1:
        raise BenchmarkMismatch(f"{label}: row counts differ between runs: {rows}")
    return Measurement(
        rows_out=rows[0],
        wall_ms=float(np.mean([s.wall_ns for s in samples])) / 1e6,
        cpu_ms=float(np.mean([s.cpu_ns for s in samples])) / 1e6,
        compile_ms=float(np.mean([s.compile_ns for s in samples])) / 1e6,
        runs=len(samples),
    )


@dataclass
class Bench:
    """Where and how measurements run."""

    db: Database
    runs: int = DEFAULT_RUNS
    config: JitConfig = field(default_factory=JitConfig.from_env)
    fresh_process: bool = False
    db_path: Optional[Path] = None
    library: Optional[TemplateLibrary] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"Number of runs must be at least 1 (got {self.runs})")

    def measure(self, text: str, backend: Backend) -> Measurement:
        if self.fresh_process:
            return self._measure_fresh(text, backend)
        samples, rows = [], []
        for _ in range(self.runs):
            program = plan_query(self.db, text)
            sink = CountingSink()
            samples.append(run_backend(backend, program, self.db, sink, self.config, self.library))
            rows.append(sink.count)
        return _averaged(samples, rows, f"{backend.value} on {text!r}")

    def _database_file(self) -> Path:
        if self.db_path is None:
            handle, name = tempfile.mkstemp(prefix="qjit-bench-", suffix=".qjdb", dir=self.config.work_dir())
            os.close(handle)
            self.db_path = Path(name)
            save_table(self.db.tables[0], self.db_path)
        return self.db_path

    def _measure_fresh(self, text: str, backend: Backend) -> Measurement:
        db_path = self._database_file()
        env = dict(os.environ, QJIT_TOOLCHAIN=shlex.join(self.config.toolchain_command))
        samples, rows = [], []
        for run in range(self.runs):
            with tempfile.TemporaryDirectory(dir=self.config.work_dir()) as scratch:
                stats_path = Path(scratch) / "stats.json"
                command = [sys.executable, str(MAIN_SCRIPT), "run", "--backend", backend.value,
                           "--db", str(db_path), "--count", "--threshold", str(self.config.threshold),
                           "--opt", self.config.opt_level, "--stats-json", str(stats_path), text]
                logger.debug("Run %d: %s", run + 1, shlex.join(command))
                result = subprocess.run(command, capture_output=True, text=True, env=env)
                if result.returncode != 0:
                    raise BenchmarkMismatch(
                        f"{backend.value} run {run + 1} exited with {result.returncode}: {result.stderr.strip()}")
                payload = json.loads(stats_path.read_text(encoding="utf-8"))
            rows.append(payload.pop("rows_out"))
            samples.append(RunStats(**payload))
        return _averaged(samples, rows, f"{backend.value} on {text!r}")

    def records(self, experiment: str, text: str, backends: Iterable[Backend],
                selectivity: float = 0.0) -> list[BenchRecord]:
        """
        Measure one query on several backends.

        Raises:
            BenchmarkMismatch: If the backends disagree on the number of rows
        """
        loop_ops = count_loop_ops(plan_query(self.db, text))
        records = []
        for backend in backends:
            logger.info("Experiment %s: %s, %d loop ops, selectivity %.2f", experiment, backend.value, loop_ops,
                        selectivity)
            m = self.measure(text, backend)
            records.append(BenchRecord(experiment, backend.value, loop_ops, selectivity, m.rows_out, m.wall_ms,
                                       m.cpu_ms, m.compile_ms, m.runs))
        check_agreement(records)
        return records


def check_agreement(records: Sequence[BenchRecord]) -> None:
    """
    Raises:
        BenchmarkMismatch: If records of one query report different rows_out
    """
    counts = {record.backend: record.rows_out for record in records}
    if len(set(counts.values())) > 1:
        raise BenchmarkMismatch(f"backends disagree on the result size: {counts}")


def run_experiment_a(bench: Bench, op_counts: Iterable[int] = EXP_A_OP_COUNTS,
                     backends: Iterable[Backend] = EXP_A_BACKENDS) -> list[BenchRecord]:
    records = []
    for target in op_counts:
        text = gen_bench_query(pairs_for_loop_ops(target))
        records += bench.records("A", text, backends)
    return records


def run_experiment_b(bench: Bench, selectivities: Iterable[float] = EXP_B_SELECTIVITIES,
                     target_loop_ops: int = EXP_B_TARGET_LOOP_OPS,
                     backends: Iterable[Backend] = EXP_B_BACKENDS) -> list[BenchRecord]:
    pairs = pairs_for_loop_ops(target_loop_ops, with_bound=True)
    table = bench.db.tables[0]
    records = []
    for selectivity in selectivities:
        bound = bound_for_selectivity(table, selectivity)
        text = gen_bench_query(pairs, bound=bound)
        records += bench.records("B", text, backends, selectivity)
    return records


def run_experiment_c(bench: Bench, op_counts: Iterable[int] = EXP_A_OP_COUNTS,
                     backends: Iterable[Backend] = EXP_C_BACKENDS) -> list[BenchRecord]:
    records = []
    for target in op_counts:
        text = gen_bench_query(pairs_for_loop_ops(target))
        records += bench.records("C", text, backends)
    return records
