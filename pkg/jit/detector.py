"""
Hot-loop detection.

Every backward jump observed by the interpreter increments the counter of
its target instruction; the jump that moves a counter from threshold to
threshold + 1 reports the loop [target, source] once.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

from vm.program import Program

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Region:
    """Contiguous instruction range [head, tail] entered at head."""
    head: int
    tail: int

    def __contains__(self, pc: int) -> bool:
        return self.head <= pc <= self.tail

    def __len__(self) -> int:
        return self.tail - self.head + 1


class LoopDetector:
    def __init__(self, threshold: Union[int, float]):
        self.threshold = threshold

    def observe_jump(self, program: Program, from_pc: int, to_pc: int) -> Optional[Region]:
        """
        Record a jump taken by the interpreter.

        Returns:
            The region to compile when this jump makes the target hot,
            otherwise None
        """
        if to_pc >= from_pc:
            return None
        op = program.ops[to_pc]
        op.hot_count += 1
        if op.hot_count == self.threshold + 1 and op.compiled_entry is None:
            logger.info("Loop [%d, %d] became hot after %d backward jumps", to_pc, from_pc, op.hot_count)
            return Region(to_pc, from_pc)
        return None
