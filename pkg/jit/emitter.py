"""
Region source emission.

A region becomes one function, region(state, db, aOp), written as a label
state machine: `lbl` holds the label to run next and each instruction
(and each block-local label) is an `if lbl == N:` block in program order.
A jump to a later label inside the region assigns lbl and falls into that
block; a jump to the same or an earlier label also continues the loop. A
jump leaving the region returns Exit(target).

Instruction labels are program positions; block-local labels are numbered
from len(program) upward so the two never collide.
"""

import ast
import logging
import textwrap

from errors import JitError, NonTerminatingRegion
from extractor.astutil import assign, const
from extractor.instantiate import ExitRenderer
from extractor.library import TemplateLibrary
from extractor.transform import (DEOPT_RETURN, ERROR_RETURN, FALLTHROUGH_NEXT, HALT_RETURN, JUMP_TO_P2,
                                 ROW_RETURN)
from jit.detector import Region
from vm.opcodes import JUMP_OPCODES
from vm.program import Program, program_hash

logger = logging.getLogger(__name__)

REGION_ENTRY = "region"


class RegionExits(ExitRenderer):
    def __init__(self, region: Region, pos: int, local_ids: dict[str, int]):
        self.region = region
        self.pos = pos
        self.local_ids = local_ids

    def goto_op(self, target: ast.expr, is_next: bool) -> list[ast.stmt]:
        if not isinstance(target, ast.Constant):
            raise JitError(f"jump target at {self.pos} is not constant: {ast.unparse(target)}")
        destination = target.value
        if destination in self.region:
            stmts = [assign("lbl", const(destination))]
            if destination <= self.pos:
                stmts.append(ast.Continue())
            return stmts
        return [ast.Return(value=ast.Call(func=ast.Name(id="Exit", ctx=ast.Load()),
                                          args=[const(destination)], keywords=[]))]

    def goto_local(self, label: str) -> list[ast.stmt]:
        return [assign("lbl", const(self.local_ids[label]))]


def region_name(program: Program, region: Region) -> str:
    return f"region_{program_hash(program)}_{region.head}_{region.tail}"


def check_region_exits(program: Program, region: Region, library: TemplateLibrary, specialized: bool) -> None:
    """
    Reject regions no execution can leave.

    Raises:
        NonTerminatingRegion: If every exit of every instruction stays inside
    """
    for pos in range(region.head, region.tail + 1):
        op = program.ops[pos]
        kinds = library.template_for(op.opcode, specialized).exit_kinds
        if kinds & {ROW_RETURN, HALT_RETURN, ERROR_RETURN, DEOPT_RETURN}:
            return
        if FALLTHROUGH_NEXT in kinds and pos + 1 not in region:
            return
        if JUMP_TO_P2 in kinds and op.opcode in JUMP_OPCODES and op.p2 not in region:
            return
    raise NonTerminatingRegion(f"region [{region.head}, {region.tail}] has no exit")


def emit_region_source(program: Program, region: Region, library: TemplateLibrary,
                       specialized: bool = False, count_instructions: bool = False) -> str:
    """
    Emit the source of one compiled region.

    Parameters:
        program: Program the region belongs to
        region: Instruction range [head, tail]
        library: Templates to instantiate
        specialized: Use integer-only comparison templates
        count_instructions: Increment state.retired on each instruction entry

    Returns:
        Module source defining region(state, db, aOp)

    Raises:
        MissingTemplate, UnsupportedOpcode: If an instruction cannot be emitted
        NonTerminatingRegion: If the region has no exit
    """
    if not (0 <= region.head <= region.tail < len(program.ops)):
        raise JitError(f"region [{region.head}, {region.tail}] is outside the program")
    table = library.emitter_table(specialized)
    for pos in range(region.head, region.tail + 1):
        library.template_for(program.ops[pos].opcode, specialized)
    check_region_exits(program, region, library, specialized)

    next_local = len(program.ops)
    blocks = []
    for pos in range(region.head, region.tail + 1):
        op = program.ops[pos]
        writer = table[op.opcode]
        labels = [segment.label for segment in writer.template.segments[1:]]
        local_ids = {label: next_local + offset for offset, label in enumerate(labels)}
        next_local += len(labels)
        segments = writer.write(op, pos, RegionExits(region, pos, local_ids))
        for segment in segments:
            label_id = pos if segment.label is None else local_ids[segment.label]
            body = ast.unparse(ast.fix_missing_locations(ast.Module(body=segment.body, type_ignores=[])))
            if segment.label is None and count_instructions:
                body = "state.retired += 1\n" + body
            comment = writer.invocation(op, pos) if segment.label is None else f"{op.opcode.name}.{segment.label}"
            blocks.append(f"# {comment}\nif lbl == {label_id}:\n{textwrap.indent(body or 'pass', '    ')}")

    prologue = "\n".join(ast.unparse(stmt) for stmt in library.prologue)
    mode = "specialized" if specialized else "generic"
    source = (
        f"# {region_name(program, region)}: ops [{region.head}, {region.tail}], {mode}\n"
        f"SEMANTICS_SHA256 = {library.semantics_sha256!r}\n\n\n"
        f"def {REGION_ENTRY}(state, db, aOp):\n"
        + textwrap.indent(prologue, "    ") + "\n"
        + f"    lbl = {region.head}\n"
        + "    while True:\n"
        + textwrap.indent("\n".join(blocks), " " * 8) + "\n"
        + "        return Error(ErrorCode.BAD_JUMP, lbl)\n"
    )
    logger.debug("Emitted %s (%d blocks)", region_name(program, region), len(blocks))
    return source
