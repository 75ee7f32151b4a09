"""
Instruction set of the query VM.

The opcode names follow SQLite's VDBE. Numeric codes are part of the
template artifacts (they are baked into every template invocation), so
they never change meaning once assigned.
"""

from enum import IntEnum


class Opcode(IntEnum):
    Init = 1
    Transaction = 2
    Integer = 3
    OpenRead = 4
    Rewind = 5
    Column = 6
    Copy = 7
    ResultRow = 8
    Next = 9
    Goto = 10
    Halt = 11
    Eq = 12
    Ne = 13
    Lt = 14
    Le = 15
    Gt = 16
    Ge = 17
    Int64 = 18


class ErrorCode(IntEnum):
    TYPE_MISMATCH = 1
    NO_CURSOR = 2
    BAD_REGISTER = 3
    BAD_JUMP = 4


class ReturnCode(IntEnum):
    ROW = 100
    HALT = 101


COMPARISON_OPCODES = (Opcode.Eq, Opcode.Ne, Opcode.Lt, Opcode.Le, Opcode.Gt, Opcode.Ge)

# Opcodes whose p2 is a jump target.
JUMP_OPCODES = frozenset({Opcode.Init, Opcode.Goto, Opcode.Rewind, Opcode.Next,
                          *COMPARISON_OPCODES})

# Negation of each comparison (the total order makes it exact, Null included).
NEGATED = {
    Opcode.Eq: Opcode.Ne,
    Opcode.Ne: Opcode.Eq,
    Opcode.Lt: Opcode.Ge,
    Opcode.Ge: Opcode.Lt,
    Opcode.Gt: Opcode.Le,
    Opcode.Le: Opcode.Gt,
}

OPERAND_DOCS = {
    Opcode.Init: ("unused", "start address", "unused", "Jump to the first instruction of the program."),
    Opcode.Transaction: ("database", "unused", "unused", "Begin a read transaction (no effect)."),
    Opcode.Integer: ("value", "register", "unused", "Store the integer p1 in register p2."),
    Opcode.OpenRead: ("cursor", "table id", "unused", "Open read cursor p1 on table p2."),
    Opcode.Rewind: ("cursor", "jump if empty", "unused", "Position cursor p1 on its first row; jump to p2 if the table is empty."),
    Opcode.Column: ("cursor", "column", "register", "Store column p2 of the current row of cursor p1 in register p3."),
    Opcode.Copy: ("source", "destination", "unused", "Copy register p1 into register p2."),
    Opcode.ResultRow: ("first register", "count", "unused", "Yield registers p1..p1+p2-1 as a result row."),
    Opcode.Next: ("cursor", "loop head", "unused", "Advance cursor p1; jump to p2 while rows remain."),
    Opcode.Goto: ("unused", "target", "unused", "Jump to p2."),
    Opcode.Halt: ("unused", "unused", "unused", "Stop execution."),
    Opcode.Eq: ("right register", "target", "left register", "Jump to p2 if r[p3] = r[p1]."),
    Opcode.Ne: ("right register", "target", "left register", "Jump to p2 if r[p3] <> r[p1]."),
    Opcode.Lt: ("right register", "target", "left register", "Jump to p2 if r[p3] < r[p1]."),
    Opcode.Le: ("right register", "target", "left register", "Jump to p2 if r[p3] <= r[p1]."),
    Opcode.Gt: ("right register", "target", "left register", "Jump to p2 if r[p3] > r[p1]."),
    Opcode.Ge: ("right register", "target", "left register", "Jump to p2 if r[p3] >= r[p1]."),
    Opcode.Int64: ("high 32 bits", "register", "low 32 bits", "Store the 64-bit integer with high half p1 and low half p3 in register p2."),
}


def describe_opcodes() -> str:
    """
    Render the instruction set as a markdown document (opcodes.md).

    Returns:
        Markdown text with one table row per opcode
    """
    lines = [
        "# Opcodes",
        "",
        "Generated by `python main.py templates --docs opcodes.md`.",
        "",
        "| Opcode | Code | p1 | p2 | p3 | Jumps | Effect |",
        "|---|---|---|---|---|---|---|",
    ]
    for opcode in Opcode:
        p1, p2, p3, effect = OPERAND_DOCS[opcode]
        jumps = "yes" if opcode in JUMP_OPCODES else "no"
        lines.append(f"| {opcode.name} | {int(opcode)} | {p1} | {p2} | {p3} | {jumps} | {effect} |")
    lines.append("")
    return "\n".join(lines)
