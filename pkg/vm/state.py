"""
Execution state of one program run and the outcomes a step can produce.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from vm.opcodes import ErrorCode
from vm.program import Program
from vm.values import Value


class VmStatus(Enum):
    RUNNING = "running"
    YIELDED = "yielded"
    HALTED = "halted"
    ERRORED = "errored"


@dataclass(slots=True, eq=False)
class Cursor:
    """
    Read cursor over one table.

    row_index < n_rows unless at_end.
    """
    table_id: int
    rows: list
    n_rows: int
    n_columns: int
    row_index: int = 0
    at_end: bool = False


@dataclass(slots=True, eq=False)
class VmState:
    registers: list[Value]
    cursors: dict[int, Cursor] = field(default_factory=dict)
    pc: int = 0
    status: VmStatus = VmStatus.RUNNING
    retired: int = 0
    # Set by threaded handlers when they leave the trampoline.
    outcome: object = None

    @classmethod
    def for_program(cls, program: Program) -> "VmState":
        return cls(registers=[None] * program.register_count)

    def row_values(self, first: int, count: int) -> list[Value]:
        return self.registers[first:first + count]


# ----------------------------------------------------------------- outcomes

class Continue:
    __slots__ = ()

    def __repr__(self) -> str:
        return "CONTINUE"


CONTINUE = Continue()


@dataclass(frozen=True, slots=True)
class Row:
    first_reg: int
    reg_count: int
    resume_pc: int


@dataclass(frozen=True, slots=True)
class Halted:
    pc: int = 0


@dataclass(frozen=True, slots=True)
class Error:
    code: ErrorCode
    pc: int = 0


@dataclass(frozen=True, slots=True)
class Exit:
    """A compiled region left through a jump to pc outside itself."""
    pc: int


@dataclass(frozen=True, slots=True)
class Deopt:
    """A specialization guard failed at pc; pc has not executed."""
    pc: int


@dataclass(frozen=True, slots=True)
class Jumped:
    """The jump-hooked interpreter stopped to report a jump from_pc -> to_pc."""
    from_pc: int
    to_pc: int


StepOutcome = Union[Continue, Row, Halted, Error]
RegionOutcome = Union[Row, Halted, Error, Exit, Deopt]
