"""
Utility functions for the command line and the benchmark harness
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from storage.fileformat import load_table
from storage.generate import generate_mixed_table, generate_table
from storage.schema import Database
from vm.values import Value

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """
    Configure the root logger once: DEBUG with verbose, WARNING otherwise,
    always on stderr.
    """
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def parse_int_list(text: str) -> list[int]:
    """
    Parse a comma-separated list of positive integers ("10,20,30").

    Raises:
        ValueError: If an item is not a positive integer
    """
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        value = int(item)
        if value < 1:
            raise ValueError(f"Expected a positive integer (got {value})")
        values.append(value)
    if not values:
        raise ValueError("Expected at least one value")
    return values


def parse_fraction_list(text: str) -> list[float]:
    """
    Parse a comma-separated list of fractions in [0, 1] ("0,0.2,0.4").

    Raises:
        ValueError: If an item is not a number in [0, 1]
    """
    values = [float(item) for item in text.split(",") if item.strip()]
    for value in values:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"Fraction must be in [0, 1] (got {value})")
    if not values:
        raise ValueError("Expected at least one value")
    return values


def parse_range(text: str) -> tuple[int, int]:
    """
    Parse a half-open integer range written "LO:HI" ("0:1000", "-50:50").

    Raises:
        ValueError: If the text is not two integers or HI <= LO
    """
    low_text, sep, high_text = text.partition(":")
    if not sep:
        raise ValueError(f"Expected LO:HI (got '{text}')")
    low, high = int(low_text), int(high_text)
    if high <= low:
        raise ValueError(f"Range {low}:{high} is empty")
    return low, high


def format_value(value: Value) -> str:
    """TSV rendering of a register value."""
    if value is None:
        return "NULL"
    return str(value)


def format_row(row: list[Value]) -> str:
    return "\t".join(format_value(value) for value in row)


def open_database(path: Optional[Path], rows: int, seed: int, mixed: bool = False,
                  value_range: Optional[tuple[int, int]] = None) -> Database:
    """
    Database with a single table: read from a QJDB file when a path is
    given, generated from (rows, seed, value_range) otherwise. Mixed tables
    ignore value_range.
    """
    if path is not None:
        return Database([load_table(path)])
    table = generate_mixed_table(rows, seed) if mixed else generate_table(rows, seed, value_range)
    return Database([table])
