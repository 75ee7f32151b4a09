"""
Row delivery and run statistics shared by every backend.
"""

import time
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Optional

from vm.state import Row, VmState
from vm.values import Value


class SinkAction(Enum):
    CONTINUE = "continue"
    ABORT = "abort"


# A sink receives each result row; returning ABORT stops the run.
RowSink = Callable[[list[Value]], Optional[SinkAction]]


@dataclass
class RunStats:
    rows_emitted: int = 0
    instructions_retired: int = 0
    wall_ns: int = 0
    cpu_ns: int = 0
    compile_ns: int = 0
    compilations: int = 0
    compile_failures: int = 0
    compilations_skipped: int = 0
    region_entries: int = 0
    region_rows: int = 0
    deopts: int = 0
    aborted: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


class CollectingSink:
    """Keeps every row (tests, small queries)."""

    def __init__(self, limit: Optional[int] = None):
        self.rows: list[list[Value]] = []
        self.limit = limit

    def __call__(self, row: list[Value]) -> SinkAction:
        self.rows.append(row)
        if self.limit is not None and len(self.rows) >= self.limit:
            return SinkAction.ABORT
        return SinkAction.CONTINUE


class CountingSink:
    """Counts rows without keeping them (benchmarks)."""

    def __init__(self):
        self.count = 0

    def __call__(self, row: list[Value]) -> SinkAction:
        self.count += 1
        return SinkAction.CONTINUE


def deliver_row(state: VmState, outcome: Row, sink: RowSink, stats: RunStats) -> bool:
    """
    Hand a Row outcome to the sink and move the state to the resume point.

    Returns:
        False when the sink asked to abort
    """
    state.pc = outcome.resume_pc
    stats.rows_emitted += 1
    if sink(state.row_values(outcome.first_reg, outcome.reg_count)) is SinkAction.ABORT:
        stats.aborted = True
        return False
    return True


class RunTimer:
    """Wall and CPU time of a run, written into RunStats on exit."""

    def __init__(self, stats: RunStats):
        self.stats = stats

    def __enter__(self):
        self._wall = time.perf_counter_ns()
        self._cpu = time.process_time_ns()
        return self

    def __exit__(self, *exc_info):
        self.stats.wall_ns += time.perf_counter_ns() - self._wall
        self.stats.cpu_ns += time.process_time_ns() - self._cpu
        return False
