"""
Minimal semantics source with a single Ge case, used by the golden
template test.
"""

from semantics.markers import abort_due_to_error, jump_to_p2, no_inline
from vm.opcodes import ErrorCode, Opcode


@no_inline
def vdbe_exec(state, db, aOp):
    aMem = state.registers
    pc = state.pc
    while True:
        pOp = aOp[pc]
        match pOp.opcode:
            case Opcode.Ge:
                pIn3 = aMem[pOp.p3]
                pIn1 = aMem[pOp.p1]
                if pIn3 is None or pIn1 is None:
                    abort_due_to_error(ErrorCode.TYPE_MISMATCH)
                if pIn3 >= pIn1:
                    jump_to_p2()
                break
