"""
Scan-filter-project plans.

Layout of every plan:

    Init          -> Transaction
    Transaction
    Integer       one per distinct literal, registers 1..k (Int64 for
                  literals outside 32 bits)
    OpenRead      cursor 0 on the table
    Rewind        empty table -> Halt
  head:
    Column        one per referenced column, selected column first
    comparisons   the predicate (see below)
    Copy          selected column -> output register
    ResultRow
    Next          -> head while rows remain
    Halt

Predicate encoding for OR-groups g0 .. gm: in every group but the last,
each atom but the last jumps to the next group when it fails and the last
atom jumps to Copy when it holds (falling through to the next group when it
fails). In the last group every atom jumps to Next when it fails and the
group falls through into Copy.
"""

from dataclasses import dataclass

from errors import NoLoopError, ProgramValidationError, UnknownColumnError, UnknownTableError
from planner.parser import Comparison, QueryAst
from storage.schema import TableSchema
from vm.opcodes import NEGATED, Opcode
from vm.program import INT32_MAX, INT32_MIN, Op, PlanLayout, Program, split_int64, validate_program

COMPARISON_OPS = {
    "=": Opcode.Eq,
    "<>": Opcode.Ne,
    "<": Opcode.Lt,
    "<=": Opcode.Le,
    ">": Opcode.Gt,
    ">=": Opcode.Ge,
}

CURSOR = 0


@dataclass
class _Registers:
    literals: dict[int, int]
    columns: dict[int, int]
    output: int

    @property
    def count(self) -> int:
        return self.output + 1


def _allocate(query: QueryAst, schema: TableSchema) -> _Registers:
    literals: dict[int, int] = {}
    for atom in query.atoms():
        if atom.value not in literals:
            literals[atom.value] = len(literals) + 1
    columns: dict[int, int] = {}
    referenced = [query.column] + [atom.column for atom in query.atoms()]
    for column_name in referenced:
        index = schema.column_index(column_name)
        if index < 0:
            raise UnknownColumnError(f"Unknown column '{column_name}' in table '{schema.name}'")
        if index not in columns:
            columns[index] = len(literals) + len(columns) + 1
    return _Registers(literals, columns, len(literals) + len(columns) + 1)


def _load_literal(value: int, reg: int) -> Op:
    if INT32_MIN <= value <= INT32_MAX:
        return Op(Opcode.Integer, p1=value, p2=reg)
    high, low = split_int64(value)
    return Op(Opcode.Int64, p1=high, p2=reg, p3=low)


def _comparison(atom: Comparison, registers: _Registers, schema: TableSchema, target: int,
                negate: bool) -> Op:
    opcode = COMPARISON_OPS[atom.op]
    if negate:
        opcode = NEGATED[opcode]
    column_reg = registers.columns[schema.column_index(atom.column)]
    return Op(opcode, p1=registers.literals[atom.value], p2=target, p3=column_reg)


def plan(query: QueryAst, schema: TableSchema, table_id: int = 0, source_text: str | None = None) -> Program:
    """
    Translate a parsed query into a validated program.

    Parameters:
        query: Parsed query
        schema: Schema of the table the query reads
        table_id: Id of that table in the database (OpenRead p2)
        source_text: Query text kept on the program for listings

    Returns:
        Program with main_loop_head and layout set

    Raises:
        UnknownTableError, UnknownColumnError: If the query does not match
            the schema
    """
    if query.table != schema.name:
        raise UnknownTableError(f"Unknown table '{query.table}'")
    registers = _allocate(query, schema)
    groups = query.predicate or ()
    n_literals = len(registers.literals)
    n_atoms = sum(len(group) for group in groups)

    integers_start = 2
    open_read = integers_start + n_literals
    rewind = open_read + 1
    head = rewind + 1
    comparisons_start = head + len(registers.columns)
    copy = comparisons_start + n_atoms
    result_row = copy + 1
    next_pos = result_row + 1
    halt = next_pos + 1

    ops = [Op(Opcode.Init, p2=1), Op(Opcode.Transaction)]
    ops += [_load_literal(value, reg) for value, reg in registers.literals.items()]
    ops.append(Op(Opcode.OpenRead, p1=CURSOR, p2=table_id))
    ops.append(Op(Opcode.Rewind, p1=CURSOR, p2=halt))
    ops += [Op(Opcode.Column, p1=CURSOR, p2=index, p3=reg) for index, reg in registers.columns.items()]

    position = comparisons_start
    for number, group in enumerate(groups):
        last_group = number == len(groups) - 1
        group_end = position + len(group)
        for index, atom in enumerate(group):
            if last_group:
                ops.append(_comparison(atom, registers, schema, next_pos, negate=True))
            elif index < len(group) - 1:
                ops.append(_comparison(atom, registers, schema, group_end, negate=True))
            else:
                ops.append(_comparison(atom, registers, schema, copy, negate=False))
        position = group_end

    selected_reg = registers.columns[schema.column_index(query.column)]
    ops.append(Op(Opcode.Copy, p1=selected_reg, p2=registers.output))
    ops.append(Op(Opcode.ResultRow, p1=registers.output, p2=1))
    ops.append(Op(Opcode.Next, p1=CURSOR, p2=head))
    ops.append(Op(Opcode.Halt))

    layout = PlanLayout(init=0, transaction=1, integers=(integers_start, open_read), open_read=open_read,
                        rewind=rewind, loop_head=head, comparisons=(comparisons_start, copy), copy=copy,
                        result_row=result_row, next=next_pos, halt=halt)
    program = Program(ops=ops, register_count=registers.count, main_loop_head=head,
                      source_text=source_text, layout=layout)
    report = validate_program(program)
    if not report.ok:
        raise ProgramValidationError(report)
    return program


def count_loop_ops(program: Program) -> int:
    """
    Number of instructions from the main loop head to its Next, inclusive.

    Raises:
        NoLoopError: If the program has no main loop
    """
    head = program.main_loop_head
    if head is None:
        raise NoLoopError("program has no main loop")
    if program.layout is not None:
        return program.layout.next - head + 1
    for pos, op in enumerate(program.ops):
        if op.opcode == Opcode.Next and op.p2 == head:
            return pos - head + 1
    raise NoLoopError(f"no Next jumps back to the loop head at {head}")
