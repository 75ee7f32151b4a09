"""
JIT backend driver.

The program runs in the jump-hooked switch interpreter, which stops on
every backward jump and on every jump onto an instruction with a compiled
entry. Backward jumps feed the loop detector; when a loop becomes hot its
region is emitted, compiled by the external toolchain, loaded and installed
on the loop head, and control enters it right away.

A region hands control back with Row (deliver, resume interpreting after
the ResultRow), Exit (interpret from the jump target), Deopt (interpret the
guarded instruction generically) or Halted/Error. Any failure to produce a
region is logged and the loop keeps running interpreted.
"""

import logging
from typing import Optional

from backends.interpreters import get_interpreters
from backends.protocol import RowSink, RunStats, RunTimer, deliver_row
from errors import JitError, VmRuntimeError
from extractor.library import TemplateLibrary, default_library
from jit.compiler import compile_region
from jit.config import JitConfig
from jit.detector import LoopDetector, Region
from jit.emitter import emit_region_source, region_name
from jit.loader import load_and_install
from storage.schema import Database
from vm.opcodes import ErrorCode, Opcode
from vm.program import Program
from vm.state import Deopt, Error, Exit, Halted, Jumped, Row, VmState, VmStatus

logger = logging.getLogger(__name__)


def _remaining_rows(program: Program, region: Region, state: VmState) -> Optional[int]:
    next_op = program.ops[region.tail]
    if next_op.opcode != Opcode.Next:
        return None
    cursor = state.cursors.get(next_op.p1)
    return None if cursor is None else cursor.n_rows - cursor.row_index


def compile_hot_region(program: Program, region: Region, library: TemplateLibrary, config: JitConfig,
                       stats: RunStats, count_instructions: bool = False) -> bool:
    """
    Emit, compile, load and install one region.

    Returns:
        True when the region head now has a compiled entry
    """
    name = region_name(program, region)
    try:
        source = emit_region_source(program, region, library, config.specialized, count_instructions)
        compiled = compile_region(source, name, config)
        stats.compile_ns += compiled.compile_ns
        load_and_install(compiled, program, region.head)
    except JitError as exc:
        stats.compile_failures += 1
        detail = f": {exc.diagnostics}" if getattr(exc, "diagnostics", "") else ""
        logger.warning("JIT compilation of %s failed, interpreting instead (%s)%s", name, exc, detail)
        return False
    stats.compilations += 1
    logger.info("Compiled %s in %.2f ms", name, compiled.compile_ns / 1e6)
    return True


def run_jit(program: Program, db: Database, sink: RowSink, config: Optional[JitConfig] = None,
            library: Optional[TemplateLibrary] = None, count_instructions: bool = False) -> RunStats:
    """
    Execute program to completion, compiling hot loops.

    Parameters:
        program: Validated program (its hot counters and entries are used)
        db: Database the program reads
        sink: Receives each result row
        config: JIT configuration (defaults to JitConfig.from_env())
        library: Templates (defaults to the shipped semantics)
        count_instructions: Count retired instructions

    Returns:
        RunStats; compile_ns is included in wall_ns and cpu_ns of the run

    Raises:
        VmRuntimeError: If the program stops with an error
    """
    config = config or JitConfig.from_env()
    library = library or default_library()
    loop = get_interpreters(library).switch_loop(counting=count_instructions, hooked=True)
    detector = LoopDetector(config.threshold)
    state = VmState.for_program(program)
    stats = RunStats()
    ops = program.ops

    with RunTimer(stats):
        while True:
            outcome = loop(state, db, ops)
            if type(outcome) is Jumped:
                region = detector.observe_jump(program, outcome.from_pc, outcome.to_pc)
                if region is not None:
                    remaining = _remaining_rows(program, region, state)
                    if remaining is not None and remaining < config.min_remaining_rows:
                        stats.compilations_skipped += 1
                        logger.info("Skipping region [%d, %d]: %d rows left", region.head, region.tail, remaining)
                    else:
                        compile_hot_region(program, region, library, config, stats, count_instructions)
                entry = ops[state.pc].compiled_entry
                if entry is None:
                    continue
                stats.region_entries += 1
                try:
                    outcome = entry(state, db, ops)
                except IndexError:
                    outcome = Error(ErrorCode.BAD_REGISTER, state.pc)
                if type(outcome) is Row:
                    stats.region_rows += 1
                elif type(outcome) is Exit:
                    state.pc = outcome.pc
                    continue
                elif type(outcome) is Deopt:
                    stats.deopts += 1
                    if count_instructions:
                        state.retired -= 1
                    state.pc = outcome.pc
                    continue

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
            raise TypeError(f"unexpected outcome {outcome!r}")
    stats.instructions_retired = state.retired
    return stats
