"""
Threaded backend.

Each instruction gets its own handler with its operands bound; a handler
ends by returning the handler of the instruction that runs next, so the
driver is a bare trampoline with no opcode decode.
"""

from typing import Callable, Optional

from backends.interpreters import Interpreters, get_interpreters
from backends.protocol import RowSink, RunStats, RunTimer, deliver_row
from errors import VmRuntimeError
from storage.schema import Database
from vm.program import Program
from vm.state import Error, Halted, Row, VmState, VmStatus


def build_handlers(program: Program, state: VmState, db: Database,
                   factories: dict[int, Callable]) -> list[Callable]:
    handlers: list[Optional[Callable]] = [None] * len(program.ops)
    for pos, op in enumerate(program.ops):
        handlers[pos] = factories[int(op.opcode)](state, db, program.ops, handlers, pos, pos + 1,
                                                  op.p1, op.p2, op.p3)
    return handlers


def run_threaded(program: Program, db: Database, sink: RowSink, count_instructions: bool = False,
                 interpreters: Optional[Interpreters] = None) -> RunStats:
    """
    Execute program to completion with the threaded interpreter.

    Same contract as run_switch.
    """
    factories = (interpreters or get_interpreters()).threaded_factories(counting=count_instructions)
    state = VmState.for_program(program)
    stats = RunStats()
    with RunTimer(stats):
        handlers = build_handlers(program, state, db, factories)
        handler = handlers[state.pc]
        while True:
            while handler is not None:
                handler = handler()
            outcome = state.outcome
            state.outcome = None
            if type(outcome) is Row:
                if not deliver_row(state, outcome, sink, stats):
                    state.status = VmStatus.HALTED
                    break
                handler = handlers[outcome.resume_pc]
                continue
            if type(outcome) is Halted:
                state.status = VmStatus.HALTED
                break
            if type(outcome) is Error:
                state.status = VmStatus.ERRORED
                raise VmRuntimeError(outcome.code, outcome.pc)
            raise TypeError(f"unexpected handler outcome {outcome!r}")
    stats.instructions_retired = state.retired
    return stats
