"""
Tests for table generation, QJDB files and CSV import
"""

import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import CsvParseError, FormatError
from storage.csv_import import import_csv
from storage.fileformat import MAGIC, decode_table, encode_table, load_table, save_table
from storage.generate import generate_mixed_table, generate_table
from storage.schema import ColumnDef, ColumnType, Database, Table, TableSchema

ANY_SCHEMA = TableSchema("test", (ColumnDef("a", ColumnType.ANY), ColumnDef("b", ColumnType.ANY)))

cells = st.one_of(st.none(), st.integers(min_value=-(2 ** 63), max_value=2 ** 63 - 1),
                  st.floats(allow_nan=False), st.text(max_size=12))


# -------------------------------------------------------------- generate

def test_generate_is_deterministic():
    assert generate_table(1000, seed=7).rows == generate_table(1000, seed=7).rows
    assert generate_table(1000, seed=7).rows != generate_table(1000, seed=8).rows


def test_generate_range_and_types():
    table = generate_table(5000, seed=1)
    values = [row[0] for row in table.rows]
    assert len(values) == 5000
    assert all(type(v) is int and 0 <= v < 5000 for v in values)
    table.validate()


def test_generate_custom_range():
    values = [row[0] for row in generate_table(200, seed=3, value_range=(-5, 5)).rows]
    assert min(values) >= -5 and max(values) < 5


def test_generate_empty():
    table = generate_table(0, seed=1)
    assert table.rows == []
    assert Database([table]).open_cursor(0).at_end


def test_generate_rejects_negative_rows():
    with pytest.raises(ValueError):
        generate_table(-1, seed=1)


def test_mixed_table_holds_both_types():
    table = generate_mixed_table(2000, seed=5, text_fraction=0.3)
    kinds = {type(row[0]) for row in table.rows}
    assert kinds == {int, str}
    table.validate()


# ------------------------------------------------------------- fileformat

def test_save_load(tmp_path):
    table = generate_table(100, seed=2)
    path = tmp_path / "t.qjdb"
    save_table(table, path)
    loaded = load_table(path)
    assert loaded.rows == table.rows
    assert loaded.schema == table.schema


@settings(max_examples=50)
@given(st.lists(st.tuples(cells, cells), max_size=30))
def test_round_trip_preserves_rows_and_order(rows):
    table = Table(ANY_SCHEMA, rows)
    decoded = decode_table(encode_table(table))
    assert decoded.rows == rows
    assert [[type(v) for v in row] for row in decoded.rows] == [[type(v) for v in row] for row in rows]


def test_header_layout():
    data = encode_table(Table(TableSchema.single_int(), [(1,)]))
    assert data[:4] == MAGIC
    assert data[4] == 1
    assert struct.unpack_from("<I", data, 5) == (1,)


def test_truncated_file():
    data = encode_table(generate_table(10, seed=1))
    with pytest.raises(FormatError, match="truncated"):
        decode_table(data[:-3])


def test_trailing_bytes():
    data = encode_table(generate_table(10, seed=1))
    with pytest.raises(FormatError, match="trailing"):
        decode_table(data + b"\x00")


def test_wide_int_is_not_stored():
    table = Table(TableSchema.single_int(), [(1,), (2 ** 64,)])
    with pytest.raises(FormatError, match="row 2"):
        encode_table(table)


def test_invalid_utf8_column_name():
    data = bytearray(encode_table(Table(TableSchema.single_int(), [(1,)])))
    assert data[13:14] == b"i"
    data[13] = 0xFF
    with pytest.raises(FormatError, match="invalid UTF-8 in column name at byte 13"):
        decode_table(bytes(data))


def test_invalid_utf8_text_value():
    schema = TableSchema("test", (ColumnDef("s", ColumnType.TEXT),))
    data = bytearray(encode_table(Table(schema, [("ok",), ("abc",)])))
    offset = data.index(b"abc") + 1
    data[offset] = 0xC3
    data[offset + 1] = 0x28
    with pytest.raises(FormatError, match=f"invalid UTF-8 in text at byte {offset}"):
        decode_table(bytes(data))


def test_unknown_version():
    data = bytearray(encode_table(generate_table(3, seed=1)))
    data[4] = 2
    with pytest.raises(FormatError, match="version"):
        decode_table(bytes(data))


def test_bad_magic():
    with pytest.raises(FormatError):
        decode_table(b"SQLT" + bytes(20))


# ------------------------------------------------------------- csv import

def test_import_ints(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("5\n25\n7\n")
    table = import_csv(path, TableSchema.single_int())
    assert table.rows == [(5,), (25,), (7,)]


def test_import_bad_int(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("abc\n")
    with pytest.raises(CsvParseError) as info:
        import_csv(path, TableSchema.single_int())
    assert (info.value.row, info.value.column) == (1, 1)


def test_import_int_beyond_64_bits(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("1\n99999999999999999999\n")
    with pytest.raises(CsvParseError) as info:
        import_csv(path, TableSchema.single_int())
    assert (info.value.row, info.value.column) == (2, 1)


def test_import_wide_number_in_any_column_is_real(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("99999999999999999999\n")
    schema = TableSchema("test", (ColumnDef("i", ColumnType.ANY),))
    assert import_csv(path, schema).rows == [(1e20,)]


def test_import_empty_field_is_null(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("1,\n,x\n")
    schema = TableSchema("t", (ColumnDef("a", ColumnType.INT), ColumnDef("b", ColumnType.TEXT)))
    assert import_csv(path, schema).rows == [(1, None), (None, "x")]


def test_import_mixed_column(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("3\nabc\n2.5\n7\n")
    schema = TableSchema("test", (ColumnDef("i", ColumnType.ANY),))
    rows = import_csv(path, schema).rows
    assert rows == [(3,), ("abc",), (2.5,), (7,)]
    assert [type(row[0]) for row in rows] == [int, str, float, int]


def test_import_wrong_arity(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("1\n2,3\n")
    with pytest.raises(CsvParseError) as info:
        import_csv(path, TableSchema.single_int())
    assert info.value.row == 2


# ---------------------------------------------------------------- schema

def test_schema_rejects_duplicates():
    with pytest.raises(ValueError):
        TableSchema("t", (ColumnDef("a"), ColumnDef("a")))


def test_validate_rejects_wrong_types():
    with pytest.raises(ValueError):
        Table(TableSchema.single_int(), [("x",)]).validate()
