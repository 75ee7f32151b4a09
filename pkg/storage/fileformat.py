"""
QJDB table files.

Little-endian layout:

    magic        4 bytes  b"QJDB"
    version      u8       1
    ncols        u32
    per column   u32 name length, UTF-8 name, u8 type tag
    nrows        u64
    values       row-major, each a u8 tag followed by
                   0 Null   (nothing)
                   1 Int    i64
                   2 Real   f64
                   3 Text   u32 length, UTF-8 bytes
"""

import logging
import struct
from pathlib import Path

from errors import FormatError
from storage.schema import ColumnDef, ColumnType, Table, TableSchema

logger = logging.getLogger(__name__)

MAGIC = b"QJDB"
VERSION = 1

TAG_NULL = 0
TAG_INT = 1
TAG_REAL = 2
TAG_TEXT = 3

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_INT = struct.Struct("<Bq")
_REAL = struct.Struct("<Bd")
_INT_BODY = struct.Struct("<q")
_REAL_BODY = struct.Struct("<d")


def encode_table(table: Table) -> bytes:
    out = bytearray(MAGIC)
    out += _U8.pack(VERSION)
    out += _U32.pack(len(table.schema.columns))
    for column in table.schema.columns:
        name = column.name.encode("utf-8")
        out += _U32.pack(len(name)) + name + _U8.pack(int(column.type))
    out += _U64.pack(len(table.rows))
    pack_int = _INT.pack
    pack_real = _REAL.pack
    for row_number, row in enumerate(table.rows, start=1):
        try:
            for value in row:
                kind = type(value)
                if kind is int:
                    out += pack_int(TAG_INT, value)
                elif value is None:
                    out.append(TAG_NULL)
                elif kind is float:
                    out += pack_real(TAG_REAL, value)
                elif kind is str:
                    text = value.encode("utf-8")
                    out.append(TAG_TEXT)
                    out += _U32.pack(len(text)) + text
                else:
                    raise FormatError(f"cannot store value {value!r} of type {kind.__name__}")
        except (struct.error, UnicodeEncodeError) as exc:
            raise FormatError(f"cannot store row {row_number}: {exc}") from exc
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, layout: struct.Struct, what: str) -> tuple:
        end = self.offset + layout.size
        if end > len(self.data):
            raise FormatError(f"truncated file: expected {what} at byte {self.offset}")
        values = layout.unpack_from(self.data, self.offset)
        self.offset = end
        return values

    def take_bytes(self, n: int, what: str) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise FormatError(f"truncated file: expected {n} bytes of {what} at byte {self.offset}")
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def take_text(self, n: int, what: str) -> str:
        start = self.offset
        chunk = self.take_bytes(n, what)
        try:
            return chunk.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"invalid UTF-8 in {what} at byte {start + exc.start}") from None


def decode_table(data: bytes) -> Table:
    """
    Parse QJDB bytes.

    Raises:
        FormatError: On a bad magic, unknown version, truncation, unknown
            tags, invalid UTF-8 or trailing bytes
    """
    reader = _Reader(data)
    if reader.take_bytes(4, "magic") != MAGIC:
        raise FormatError("not a QJDB file (bad magic)")
    (version,) = reader.take(_U8, "version")
    if version != VERSION:
        raise FormatError(f"unsupported QJDB version {version} (expected {VERSION})")
    (ncols,) = reader.take(_U32, "column count")
    if ncols == 0:
        raise FormatError("table has no columns")
    columns = []
    for _ in range(ncols):
        (length,) = reader.take(_U32, "column name length")
        name = reader.take_text(length, "column name")
        (tag,) = reader.take(_U8, "column type")
        try:
            columns.append(ColumnDef(name, ColumnType(tag)))
        except ValueError:
            raise FormatError(f"unknown column type tag {tag} for column '{name}'") from None
    (nrows,) = reader.take(_U64, "row count")
    rows = []
    for _ in range(nrows):
        row = []
        for _ in range(ncols):
            (tag,) = reader.take(_U8, "value tag")
            if tag == TAG_INT:
                row.append(reader.take(_INT_BODY, "integer")[0])
            elif tag == TAG_NULL:
                row.append(None)
            elif tag == TAG_REAL:
                row.append(reader.take(_REAL_BODY, "real")[0])
            elif tag == TAG_TEXT:
                (length,) = reader.take(_U32, "text length")
                row.append(reader.take_text(length, "text"))
            else:
                raise FormatError(f"unknown value tag {tag} at byte {reader.offset - 1}")
        rows.append(tuple(row))
    if reader.offset != len(data):
        raise FormatError(f"{len(data) - reader.offset} trailing bytes after the last row")
    return Table(TableSchema("test", tuple(columns)), rows)


def save_table(table: Table, path: Path | str) -> None:
    path = Path(path)
    path.write_bytes(encode_table(table))
    logger.info("Saved %d rows to %s", len(table.rows), path)


def load_table(path: Path | str, name: str = "test") -> Table:
    """
    Read a QJDB file as table 'name'.

    Raises:
        FormatError: If the file is malformed
    """
    table = decode_table(Path(path).read_bytes())
    return Table(TableSchema(name, table.schema.columns), table.rows)
