"""
Opcode semantics of the query VM.

This file is the single source every execution backend is derived from.
The engine parses it and never imports it: the template extractor turns
each case block into a parametric template, and the switch interpreter,
the threaded interpreter and the JIT's compiled regions are all
instantiated from those templates.

Authoring rules
---------------
* one function holding one ``while True`` loop whose body binds
  ``pOp = aOp[pc]`` and dispatches with a single ``match pOp.opcode``;
* one ``case`` per opcode; opcodes sharing a body are written
  ``case Opcode.A | Opcode.B`` (the body may branch on ``pOp.opcode``);
* case bodies use assignments, ``if``/``elif``/``else`` and expression
  statements only, and end every path in a control marker:

  - ``break``                            continue with the next instruction
  - ``jump_to_p2()``                     continue at instruction p2
  - ``goto('name')`` / ``label('name')``   forward jump inside the block
  - ``abort_due_to_error(code)``         stop with an error
  - ``vdbe_return(ReturnCode.ROW, first, count)``  yield a result row
  - ``vdbe_return(ReturnCode.HALT)``     stop

Changing this file changes every backend: the rendered interpreters and
emitted templates carry its SHA-256 and refuse to mix versions.
"""

from semantics.markers import abort_due_to_error, goto, jump_to_p2, label, no_inline, vdbe_return
from vm.opcodes import ErrorCode, Opcode, ReturnCode
from vm.values import MEM_NULL, mem_compare, mem_flags, null_compare

# Opcodes the JIT must leave to the interpreter.
INTERPRET_ONLY = ()


@no_inline
def vdbe_exec(state, db, aOp):
    aMem = state.registers
    cursors = state.cursors
    pc = state.pc
    while True:
        pOp = aOp[pc]
        match pOp.opcode:
            case Opcode.Init:
                jump_to_p2()

            case Opcode.Goto:
                jump_to_p2()

            case Opcode.Transaction:
                break

            case Opcode.Integer:
                aMem[pOp.p2] = pOp.p1
                break

            case Opcode.Int64:
                aMem[pOp.p2] = (pOp.p1 << 32) | (pOp.p3 & 0xFFFFFFFF)
                break

            case Opcode.OpenRead:
                cursors[pOp.p1] = db.open_cursor(pOp.p2)
                break

            case Opcode.Rewind:
                pC = cursors.get(pOp.p1)
                if pC is None:
                    abort_due_to_error(ErrorCode.NO_CURSOR)
                pC.row_index = 0
                if pC.n_rows == 0:
                    pC.at_end = True
                    jump_to_p2()
                pC.at_end = False
                break

            case Opcode.Column:
                pC = cursors.get(pOp.p1)
                if pC is None:
                    abort_due_to_error(ErrorCode.NO_CURSOR)
                if pOp.p2 >= pC.n_columns:
                    abort_due_to_error(ErrorCode.TYPE_MISMATCH)
                if pC.at_end:
                    goto('column_null')
                aMem[pOp.p3] = pC.rows[pC.row_index][pOp.p2]
                break
                label('column_null')
                aMem[pOp.p3] = None
                break

            case Opcode.Eq | Opcode.Ne | Opcode.Lt | Opcode.Le | Opcode.Gt | Opcode.Ge:
                pIn1 = aMem[pOp.p1]
                pIn3 = aMem[pOp.p3]
                flags1 = mem_flags(pIn1)
                flags3 = mem_flags(pIn3)
                if (flags1 | flags3) & MEM_NULL:
                    res = null_compare(flags3, flags1)
                else:
                    res = mem_compare(pIn3, pIn1)
                if pOp.opcode == Opcode.Eq:
                    res2 = res == 0
                elif pOp.opcode == Opcode.Ne:
                    res2 = res != 0
                elif pOp.opcode == Opcode.Lt:
                    res2 = res < 0
                elif pOp.opcode == Opcode.Le:
                    res2 = res <= 0
                elif pOp.opcode == Opcode.Gt:
                    res2 = res > 0
                else:
                    res2 = res >= 0
                if res2:
                    jump_to_p2()
                break

            case Opcode.Copy:
                aMem[pOp.p2] = aMem[pOp.p1]
                break

            case Opcode.ResultRow:
                vdbe_return(ReturnCode.ROW, pOp.p1, pOp.p2)

            case Opcode.Next:
                pC = cursors.get(pOp.p1)
                if pC is None:
                    abort_due_to_error(ErrorCode.NO_CURSOR)
                pC.row_index += 1
                if pC.row_index < pC.n_rows:
                    jump_to_p2()
                pC.at_end = True
                break

            case Opcode.Halt:
                vdbe_return(ReturnCode.HALT)
