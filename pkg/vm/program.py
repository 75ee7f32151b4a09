"""
Bytecode programs: instructions, validation and hashing.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional

from vm.opcodes import COMPARISON_OPCODES, JUMP_OPCODES, Opcode

INT32_MIN = -(2 ** 31)
INT32_MAX = 2 ** 31 - 1


def split_int64(value: int) -> tuple[int, int]:
    """
    Split a 64-bit integer into the (p1, p3) operands of an Int64 load.

    Both halves are signed 32-bit values; the VM recombines them as
    (p1 << 32) | (p3 & 0xFFFFFFFF).
    """
    high = value >> 32
    low = value & 0xFFFFFFFF
    if low > INT32_MAX:
        low -= 2 ** 32
    return high, low


@dataclass(slots=True, eq=False)
class Op:
    """
    One VM instruction.

    hot_count and compiled_entry are the only fields that change after a
    program is validated: the loop detector counts backward jumps landing
    here, and the JIT installs a compiled region entry here.
    """
    opcode: Opcode
    p1: int = 0
    p2: int = 0
    p3: int = 0
    hot_count: int = 0
    compiled_entry: Optional[Callable] = None

    def __str__(self) -> str:
        return f"{self.opcode.name} {self.p1} {self.p2} {self.p3}"


@dataclass
class PlanLayout:
    """Positions of the fixed sections of a planned scan program."""
    init: int
    transaction: int
    integers: tuple[int, int]
    open_read: int
    rewind: int
    loop_head: int
    comparisons: tuple[int, int]
    copy: int
    result_row: int
    next: int
    halt: int


@dataclass
class Program:
    ops: list[Op]
    register_count: int
    main_loop_head: Optional[int] = None
    source_text: Optional[str] = None
    layout: Optional[PlanLayout] = None

    def __len__(self) -> int:
        return len(self.ops)

    def reset_hot_state(self) -> None:
        """Forget hot counters and compiled entries (a fresh execution context)."""
        for op in self.ops:
            op.hot_count = 0
            op.compiled_entry = None


@dataclass(frozen=True)
class Finding:
    kind: str
    pc: int
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] pc={self.pc}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, kind: str, pc: int, message: str) -> None:
        self.findings.append(Finding(kind, pc, message))


def successors(op: Op, pc: int) -> list[int]:
    """Positions control can reach directly after executing op at pc."""
    if op.opcode in (Opcode.Init, Opcode.Goto):
        return [op.p2]
    if op.opcode == Opcode.Halt:
        return []
    if op.opcode in JUMP_OPCODES:
        return [pc + 1, op.p2]
    return [pc + 1]


def _registers_read_written(op: Op) -> list[int]:
    match op.opcode:
        case Opcode.Integer | Opcode.Int64:
            return [op.p2]
        case Opcode.Column:
            return [op.p3]
        case Opcode.Copy:
            return [op.p1, op.p2]
        case Opcode.ResultRow:
            return list(range(op.p1, op.p1 + max(op.p2, 1)))
        case _ if op.opcode in COMPARISON_OPCODES:
            return [op.p1, op.p3]
    return []


def validate_program(program: Program, register_file_size: Optional[int] = None) -> ValidationReport:
    """
    Check a program for structural errors before it is executed.

    Parameters:
        program: Program to check
        register_file_size: Register count to check against (defaults to
            program.register_count)

    Returns:
        ValidationReport listing every finding (empty when valid)
    """
    report = ValidationReport()
    ops = program.ops
    size = program.register_count if register_file_size is None else register_file_size
    n = len(ops)
    if n == 0:
        report.add("empty", 0, "program has no instructions")
        return report

    for pc, op in enumerate(ops):
        for name in ("p1", "p2", "p3"):
            value = getattr(op, name)
            if not INT32_MIN <= value <= INT32_MAX:
                report.add("operand", pc, f"{name}={value} does not fit a 32-bit signed integer")
        if op.opcode in JUMP_OPCODES and not 0 <= op.p2 < n:
            report.add("jump", pc, f"{op.opcode.name} jumps to {op.p2}, outside [0, {n})")
        for reg in _registers_read_written(op):
            if not 0 <= reg < size:
                report.add("register", pc, f"{op.opcode.name} uses register {reg}, outside [0, {size})")
        if op.opcode == Opcode.ResultRow and op.p2 < 1:
            report.add("register", pc, "ResultRow must yield at least one register")
        if op.opcode != Opcode.Halt and op.opcode not in (Opcode.Init, Opcode.Goto) and pc + 1 >= n:
            report.add("fallthrough", pc, f"{op.opcode.name} can fall off the end of the program")

    if report.findings:
        return report

    # Must-open cursor sets, intersected over all predecessors.
    opened: list[Optional[frozenset]] = [None] * n
    opened[0] = frozenset()
    worklist = [0]
    while worklist:
        pc = worklist.pop()
        op = ops[pc]
        current = opened[pc]
        if op.opcode == Opcode.OpenRead:
            after = current | {op.p1}
        else:
            after = current
        for succ in successors(op, pc):
            if opened[succ] is None:
                opened[succ] = after
                worklist.append(succ)
            else:
                merged = opened[succ] & after
                if merged != opened[succ]:
                    opened[succ] = merged
                    worklist.append(succ)

    halt_reachable = False
    for pc, op in enumerate(ops):
        if opened[pc] is None:
            continue
        if op.opcode == Opcode.Halt:
            halt_reachable = True
        if op.opcode in (Opcode.Rewind, Opcode.Column, Opcode.Next) and op.p1 not in opened[pc]:
            report.add("cursor", pc, f"{op.opcode.name} uses cursor {op.p1} before OpenRead")
    if not halt_reachable:
        report.add("halt", 0, "no reachable Halt")
    return report


def program_hash(program: Program) -> str:
    """Short content hash of the instruction stream, used to name regions."""
    digest = hashlib.sha1()
    for op in program.ops:
        digest.update(f"{int(op.opcode)},{op.p1},{op.p2},{op.p3};".encode())
    return digest.hexdigest()[:12]


def explain(program: Program) -> list[list]:
    """
    Rows of the EXPLAIN-style listing of a program.

    Returns:
        One [addr, opcode, p1, p2, p3, comment] row per instruction
    """
    rows = []
    layout = program.layout
    for pc, op in enumerate(program.ops):
        comment = ""
        if program.main_loop_head == pc:
            comment = "loop head"
        elif layout is not None and pc == layout.next:
            comment = "loop tail"
        rows.append([pc, op.opcode.name, op.p1, op.p2, op.p3, comment])
    return rows
