"""
Switch-dispatch backend: one loop with a single match on the opcode.
"""

from typing import Optional

from backends.interpreters import Interpreters, get_interpreters
from backends.protocol import RowSink, RunStats, RunTimer, deliver_row
from errors import VmRuntimeError
from storage.schema import Database
from vm.program import Program
from vm.state import Error, Halted, Row, VmState, VmStatus


def run_switch(program: Program, db: Database, sink: RowSink, count_instructions: bool = False,
               interpreters: Optional[Interpreters] = None) -> RunStats:
    """
    Execute program to completion with the switch interpreter.

    Parameters:
        program: Validated program
        db: Database the program reads
        sink: Receives each result row
        count_instructions: Count retired instructions (slower)

    Returns:
        RunStats of the run

    Raises:
        VmRuntimeError: If the program stops with an error
    """
    loop = (interpreters or get_interpreters()).switch_loop(counting=count_instructions)
    state = VmState.for_program(program)
    stats = RunStats()
    ops = program.ops
    with RunTimer(stats):
        while True:
            outcome = loop(state, db, ops)
            if type(outcome) is Row:
                if not deliver_row(state, outcome, sink, stats):
                    state.status = VmStatus.HALTED
                    break
                continue
            if type(outcome) is Halted:
                state.status = VmStatus.HALTED
                break
            if type(outcome) is Error:
                state.status = VmStatus.ERRORED
                raise VmRuntimeError(outcome.code, outcome.pc)
            raise TypeError(f"unexpected interpreter outcome {outcome!r}")
    stats.instructions_retired = state.retired
    return stats
