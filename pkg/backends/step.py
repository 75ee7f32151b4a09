"""
Single-instruction execution, rendered from the same templates as the
interpreters.
"""

from typing import Optional

from backends.interpreters import Interpreters, get_interpreters
from storage.schema import Database
from vm.program import Program
from vm.state import Continue, Error, Halted, Row, StepOutcome, VmState, VmStatus


def step(state: VmState, db: Database, program: Program,
         interpreters: Optional[Interpreters] = None) -> StepOutcome:
    """
    Execute the instruction at state.pc.

    A Yielded state resumes at its resume position. After a Row the state
    is Yielded with pc at the resume position; after Halted or Error the
    state is terminal and pc stays on the instruction that stopped.

    Raises:
        ValueError: If the state is already Halted or Errored
    """
    if state.status in (VmStatus.HALTED, VmStatus.ERRORED):
        raise ValueError(f"cannot step a {state.status.value} VM")
    state.status = VmStatus.RUNNING
    outcome = (interpreters or get_interpreters()).step_function()(state, db, program.ops)
    if type(outcome) is Continue:
        return outcome
    if type(outcome) is Row:
        state.pc = outcome.resume_pc
        state.status = VmStatus.YIELDED
    elif type(outcome) is Halted:
        state.status = VmStatus.HALTED
    elif type(outcome) is Error:
        state.status = VmStatus.ERRORED
    return outcome
