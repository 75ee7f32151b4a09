"""
Speedup summaries of experiment CSV files.

Speedups are switch cpu_ms divided by the backend's cpu_ms at the same
(experiment, loop_ops, selectivity) point. For experiment B the cpu_ms of
each backend is fitted linearly against selectivity.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from scipy import stats

from bench.records import BenchRecord, read_records
from errors import FormatError

BASELINE = "switch"


@dataclass
class SpeedupRow:
    experiment: str
    loop_ops: int
    selectivity: float
    backend: str
    cpu_ms: float
    compile_ms: float
    speedup: float


@dataclass
class ReportSummary:
    rows: list[SpeedupRow] = field(default_factory=list)
    # (experiment, backend) -> best speedup row
    max_speedups: dict[tuple[str, str], SpeedupRow] = field(default_factory=dict)
    # backend -> slope of cpu_ms over selectivity (experiment B)
    slopes: dict[str, float] = field(default_factory=dict)

    @property
    def slope_ratio(self) -> float | None:
        """jit slope over switch slope, when both were fitted."""
        jit, base = self.slopes.get("jit"), self.slopes.get(BASELINE)
        if jit is None or not base:
            return None
        return jit / base

    def lines(self) -> list[str]:
        out = []
        for (experiment, backend), row in sorted(self.max_speedups.items()):
            where = f"selectivity={row.selectivity:.2f}" if experiment == "B" else f"loop_ops={row.loop_ops}"
            out.append(f"[{experiment}] max {backend} speedup: {row.speedup:.2f}x ({where})")
        for backend, slope in sorted(self.slopes.items()):
            out.append(f"[B] {backend} cpu_ms slope over selectivity: {slope:.3f}")
        if self.slope_ratio is not None:
            out.append(f"[B] jit/switch slope ratio: {self.slope_ratio:.2f}")
        return out


def summarize(records: list[BenchRecord]) -> ReportSummary:
    """
    Raises:
        FormatError: If there are no records
    """
    if not records:
        raise FormatError("no benchmark records to report")
    summary = ReportSummary()
    points: dict[tuple, dict[str, BenchRecord]] = defaultdict(dict)
    for record in records:
        points[(record.experiment, record.loop_ops, record.selectivity)][record.backend] = record

    for (experiment, loop_ops, selectivity), by_backend in sorted(points.items()):
        baseline = by_backend.get(BASELINE)
        for backend, record in by_backend.items():
            if baseline is None or record.cpu_ms <= 0:
                speedup = float("nan")
            else:
                speedup = baseline.cpu_ms / record.cpu_ms
            row = SpeedupRow(experiment, loop_ops, selectivity, backend, record.cpu_ms, record.compile_ms, speedup)
            summary.rows.append(row)
            if backend == BASELINE or math.isnan(speedup):
                continue
            best = summary.max_speedups.get((experiment, backend))
            if best is None or speedup > best.speedup:
                summary.max_speedups[(experiment, backend)] = row

    by_backend_b: dict[str, list[BenchRecord]] = defaultdict(list)
    for record in records:
        if record.experiment == "B":
            by_backend_b[record.backend].append(record)
    for backend, series in by_backend_b.items():
        if len({r.selectivity for r in series}) < 2:
            continue
        fit = stats.linregress([r.selectivity for r in series], [r.cpu_ms for r in series])
        summary.slopes[backend] = float(fit.slope)
    return summary


def report(csv_path: Union[Path, str]) -> ReportSummary:
    """
    Summarize an experiment CSV.

    Raises:
        FormatError: If the file is empty or malformed
    """
    return summarize(read_records(csv_path))
