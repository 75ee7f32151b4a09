"""
CSV ingestion. Files have no header row; columns follow the schema order.
"""

import csv
import logging
import math
from pathlib import Path

from errors import CsvParseError
from storage.schema import ColumnType, Table, TableSchema
from vm.values import INT64_MAX, INT64_MIN, Value

logger = logging.getLogger(__name__)


def _parse_int(field: str) -> int:
    value = int(field)
    if not INT64_MIN <= value <= INT64_MAX:
        raise ValueError(f"{value} does not fit a 64-bit signed integer")
    return value


def _parse_real(field: str) -> float | None:
    value = float(field)
    return None if math.isnan(value) else value


def _parse_any(field: str) -> Value:
    try:
        return _parse_int(field)
    except ValueError:
        pass
    try:
        return _parse_real(field)
    except ValueError:
        return field


_PARSERS = {
    ColumnType.INT: _parse_int,
    ColumnType.REAL: _parse_real,
    ColumnType.TEXT: str,
    ColumnType.ANY: _parse_any,
}


def parse_field(field: str, column_type: ColumnType) -> Value:
    """Empty field is Null; anything else is parsed per the column type."""
    if field == "":
        return None
    return _PARSERS[column_type](field)


def import_csv(path: Path | str, schema: TableSchema) -> Table:
    """
    Read a CSV file into a table.

    Parameters:
        path: CSV file
        schema: Column names and types, in file order

    Returns:
        Table with rows in file order

    Raises:
        CsvParseError: With the 1-based row and column of a bad field or a
            row of the wrong arity
    """
    width = len(schema.columns)
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row_number, record in enumerate(csv.reader(handle), start=1):
            if not record:
                continue
            if len(record) != width:
                raise CsvParseError(f"expected {width} fields, found {len(record)}", row_number, len(record))
            values = []
            for column_number, (field, column) in enumerate(zip(record, schema.columns), start=1):
                try:
                    values.append(parse_field(field.strip(), column.type))
                except ValueError:
                    raise CsvParseError(f"cannot parse {field!r} as {column.type.name} for column '{column.name}'",
                                        row_number, column_number) from None
            rows.append(tuple(values))
    logger.info("Imported %d rows from %s", len(rows), path)
    return Table(schema, rows)
