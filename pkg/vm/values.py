"""
Register values and their total order.

A value is one of None (Null), int (Int), float (Real) or str (Text).
Ordering: Null < every numeric < every Text. Int and Real compare
numerically (Python's int/float comparison is exact); Text compares by
code point, which is the same as UTF-8 byte order.

The mem_* helpers are the runtime support called by the opcode semantics,
the interpreters rendered from it and compiled regions.
"""

import math
from enum import IntEnum
from typing import Optional, Union

Value = Optional[Union[int, float, str]]

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

MEM_NULL = 0x01
MEM_STR = 0x02
MEM_INT = 0x04
MEM_REAL = 0x08

# Names the template emitter folds to constants.
FOLDABLE_CONSTANTS = {
    "MEM_NULL": MEM_NULL,
    "MEM_STR": MEM_STR,
    "MEM_INT": MEM_INT,
    "MEM_REAL": MEM_REAL,
}

_FLAGS = {type(None): MEM_NULL, int: MEM_INT, float: MEM_REAL, str: MEM_STR, bool: MEM_INT}
_RANK = {type(None): 0, int: 1, bool: 1, float: 1, str: 2}


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def mem_flags(value: Value) -> int:
    return _FLAGS[type(value)]


def null_compare(flags_left: int, flags_right: int) -> int:
    """Three-way result when at least one side is Null."""
    if flags_left & MEM_NULL and flags_right & MEM_NULL:
        return 0
    return -1 if flags_left & MEM_NULL else 1


def mem_compare(left: Value, right: Value) -> int:
    """Three-way comparison of two values under the total order (-1, 0, 1)."""
    left_type = type(left)
    if left_type is type(right):
        if left is None:
            return 0
        return (left > right) - (left < right)
    left_rank = _RANK[left_type]
    right_rank = _RANK[type(right)]
    if left_rank != right_rank:
        return -1 if left_rank < right_rank else 1
    return (left > right) - (left < right)


def compare_values(left: Value, right: Value) -> Ordering:
    return Ordering(mem_compare(left, right))


def normalize_value(value) -> Value:
    """
    Coerce an ingested value into a register value.

    Parameters:
        value: None, int, float or str (numpy scalars are accepted)

    Returns:
        The value as a Python native; NaN becomes Null

    Raises:
        ValueError: If the value has no register representation
    """
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return None if math.isnan(value) else value
    # numpy scalars
    if hasattr(value, "item"):
        return normalize_value(value.item())
    raise ValueError(f"Unsupported value type: {type(value).__name__}")


def value_type_name(value: Value) -> str:
    return {MEM_NULL: "Null", MEM_INT: "Int", MEM_REAL: "Real", MEM_STR: "Text"}[mem_flags(value)]
