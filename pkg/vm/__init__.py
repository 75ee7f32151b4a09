"""
Bytecode program model: opcodes, values, programs and VM state.
"""

from .opcodes import ErrorCode, Opcode, ReturnCode, describe_opcodes
from .values import Value, compare_values, mem_compare, normalize_value
from .program import Op, Program, ValidationReport, explain, program_hash, validate_program
from .state import Cursor, VmState, VmStatus

__all__ = [
    'ErrorCode', 'Opcode', 'ReturnCode', 'describe_opcodes',
    'Value', 'compare_values', 'mem_compare', 'normalize_value',
    'Op', 'Program', 'ValidationReport', 'explain', 'program_hash', 'validate_program',
    'Cursor', 'VmState', 'VmStatus',
]
