"""
Synthetic benchmark tables.
"""

from typing import Optional

import numpy as np

from storage.schema import ColumnDef, ColumnType, Table, TableSchema

DEFAULT_ROWS = 1_000_000


def generate_table(n_rows: int, seed: int, value_range: Optional[tuple[int, int]] = None,
                   name: str = "test", column: str = "i") -> Table:
    """
    Single Int column of uniformly distributed values.

    Parameters:
        n_rows: Number of rows (>= 0)
        seed: Random seed; equal seeds give identical tables
        value_range: Half-open [low, high) of the values, default [0, n_rows)
        name, column: Table and column names

    Returns:
        Table

    Raises:
        ValueError: If n_rows is negative or the range is empty
    """
    if n_rows < 0:
        raise ValueError(f"Number of rows must be non-negative (got {n_rows})")
    schema = TableSchema.single_int(name, column)
    if n_rows == 0:
        return Table(schema, [])
    low, high = value_range if value_range is not None else (0, n_rows)
    if high <= low:
        raise ValueError(f"Value range [{low}, {high}) is empty")
    rng = np.random.default_rng(seed)
    values = rng.integers(low, high, size=n_rows, dtype=np.int64).tolist()
    return Table(schema, [(value,) for value in values])


def generate_mixed_table(n_rows: int, seed: int, text_fraction: float = 0.1,
                         name: str = "test", column: str = "i") -> Table:
    """
    Any-typed column mixing Int values in [0, n_rows) with Text values.

    Parameters:
        text_fraction: Probability of a row holding Text instead of Int

    Raises:
        ValueError: If text_fraction is outside [0, 1]
    """
    if not 0.0 <= text_fraction <= 1.0:
        raise ValueError(f"Text fraction must be in [0, 1] (got {text_fraction})")
    schema = TableSchema(name, (ColumnDef(column, ColumnType.ANY),))
    rng = np.random.default_rng(seed)
    values = rng.integers(0, max(n_rows, 1), size=n_rows, dtype=np.int64).tolist()
    is_text = (rng.random(n_rows) < text_fraction).tolist()
    rows = [(f"t{value}",) if text else (value,) for value, text in zip(values, is_text)]
    return Table(schema, rows)
