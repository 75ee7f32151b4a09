"""
Case-block extraction: one block per opcode group of the dispatch match.
"""

import ast
from dataclasses import dataclass
from typing import Iterable

from errors import MissingOpcode, SubsetViolation
from extractor.source import SemanticsSource, opcode_from_node, check_case_body
from vm.opcodes import Opcode


@dataclass
class CaseBlock:
    opcodes: tuple[Opcode, ...]
    body: list[ast.stmt]
    line: int

    @property
    def name(self) -> str:
        """Group name, taken from the first opcode of the case."""
        return self.opcodes[0].name


def _pattern_opcodes(pattern: ast.pattern) -> tuple[Opcode, ...]:
    if isinstance(pattern, ast.MatchValue):
        return (opcode_from_node(pattern.value),)
    if isinstance(pattern, ast.MatchOr):
        opcodes = []
        for alternative in pattern.patterns:
            opcodes.extend(_pattern_opcodes(alternative))
        return tuple(opcodes)
    raise SubsetViolation(f"unsupported case pattern '{ast.unparse(pattern)}'", pattern.lineno)


def extract_case_blocks(source: SemanticsSource, required: Iterable[Opcode] = tuple(Opcode)) -> list[CaseBlock]:
    """
    Split the dispatch construct into case blocks.

    Parameters:
        source: Parsed semantics
        required: Opcodes that must each own a case block

    Returns:
        Case blocks in source order

    Raises:
        SubsetViolation: On guards, unsupported patterns, duplicate opcodes
            or forbidden constructs in a block
        MissingOpcode: If a required opcode has no block
    """
    blocks = []
    seen: dict[Opcode, int] = {}
    for case in source.dispatch.cases:
        if case.guard is not None:
            raise SubsetViolation("case guards are not allowed", case.pattern.lineno)
        opcodes = _pattern_opcodes(case.pattern)
        for opcode in opcodes:
            if opcode in seen:
                raise SubsetViolation(f"opcode {opcode.name} has two case blocks "
                                      f"(lines {seen[opcode]} and {case.pattern.lineno})", case.pattern.lineno)
            seen[opcode] = case.pattern.lineno
        check_case_body(case.body, f"case {'|'.join(op.name for op in opcodes)}")
        blocks.append(CaseBlock(opcodes=opcodes, body=case.body, line=case.pattern.lineno))

    for opcode in required:
        if opcode not in seen:
            raise MissingOpcode(opcode)
    return blocks
