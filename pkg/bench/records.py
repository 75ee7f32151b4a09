"""
Benchmark result records and their CSV file.

    experiment,backend,loop_ops,selectivity,rows_out,wall_ms,cpu_ms,compile_ms,runs

experiment is A, B or C; times are averages over 'runs' measurements in
milliseconds; selectivity is the requested fraction of qualifying rows
(0 for experiments A and C).
"""

import csv
import io
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, TextIO, Union

from errors import FormatError

EXPERIMENTS = ("A", "B", "C")


@dataclass(frozen=True)
class BenchRecord:
    experiment: str
    backend: str
    loop_ops: int
    selectivity: float
    rows_out: int
    wall_ms: float
    cpu_ms: float
    compile_ms: float
    runs: int

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"Unknown experiment '{self.experiment}'")
        if self.runs < 1:
            raise ValueError(f"A record averages at least one run (got {self.runs})")


CSV_FIELDS = [f.name for f in fields(BenchRecord)]
_CONVERTERS = {f.name: f.type for f in fields(BenchRecord)}


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def write_records(records: Iterable[BenchRecord], target: Union[Path, str, TextIO]) -> None:
    """Write records with the header to a path or an open text stream."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as handle:
            write_records(records, handle)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for record in records:
        writer.writerow([_format(value) for value in astuple(record)])


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buffer = io.StringIO()
    write_records(records, buffer)
    return buffer.getvalue()


def parse_records(text: str) -> list[BenchRecord]:
    """
    Parse CSV text produced by write_records.

    Raises:
        FormatError: If the text is empty, the header differs or a value
            does not parse
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise FormatError("empty benchmark CSV")
    if [column.strip() for column in header] != CSV_FIELDS:
        raise FormatError(f"unexpected CSV header {header} (expected {CSV_FIELDS})")
    records = []
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_FIELDS):
            raise FormatError(f"line {line_number}: expected {len(CSV_FIELDS)} fields, found {len(row)}")
        try:
            values = {
                column: _CONVERTERS[column](field.strip())
                for column, field in zip(CSV_FIELDS, row)
            }
            records.append(BenchRecord(**values))
        except ValueError as e:
            raise FormatError(f"line {line_number}: {e}") from None
    if not records:
        raise FormatError("benchmark CSV has no records")
    return records


def read_records(path: Union[Path, str]) -> list[BenchRecord]:
    return parse_records(Path(path).read_text(encoding="utf-8"))
