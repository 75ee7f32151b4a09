"""
In-memory tables and the database the VM reads from.
"""

from dataclasses import dataclass, field
from enum import IntEnum

from errors import UnknownTableError
from vm.state import Cursor
from vm.values import MEM_INT, MEM_NULL, MEM_REAL, MEM_STR, Value, mem_flags


class ColumnType(IntEnum):
    INT = 1
    REAL = 2
    TEXT = 3
    ANY = 4


_ACCEPTED_FLAGS = {
    ColumnType.INT: MEM_NULL | MEM_INT,
    ColumnType.REAL: MEM_NULL | MEM_REAL | MEM_INT,
    ColumnType.TEXT: MEM_NULL | MEM_STR,
    ColumnType.ANY: MEM_NULL | MEM_INT | MEM_REAL | MEM_STR,
}


@dataclass(frozen=True)
class ColumnDef:
    name: str
    type: ColumnType = ColumnType.INT


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[ColumnDef, ...]

    def __post_init__(self):
        names = [column.name for column in self.columns]
        if not self.columns:
            raise ValueError(f"Table '{self.name}' must have at least one column")
        if len(set(names)) != len(names):
            raise ValueError(f"Table '{self.name}' has duplicate column names: {names}")

    @classmethod
    def single_int(cls, name: str = "test", column: str = "i") -> "TableSchema":
        return cls(name, (ColumnDef(column, ColumnType.INT),))

    def column_index(self, name: str) -> int:
        for index, column in enumerate(self.columns):
            if column.name == name:
                return index
        return -1


@dataclass
class Table:
    schema: TableSchema
    rows: list[tuple[Value, ...]] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.schema.name

    def __len__(self) -> int:
        return len(self.rows)

    def validate(self) -> None:
        """
        Check row arity and per-column types.

        Raises:
            ValueError: On the first row that does not match the schema
        """
        width = len(self.schema.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"Row {index} has {len(row)} values, table '{self.name}' has {width} columns")
            for column, value in zip(self.schema.columns, row):
                if not mem_flags(value) & _ACCEPTED_FLAGS[column.type]:
                    raise ValueError(
                        f"Row {index}: value {value!r} does not fit column '{column.name}' ({column.type.name})")


class Database:
    """Tables addressed by id (the OpenRead p2 operand) and by name."""

    def __init__(self, tables: list[Table] | None = None):
        self.tables: list[Table] = []
        self._ids: dict[str, int] = {}
        for table in tables or []:
            self.add(table)

    def add(self, table: Table) -> int:
        if table.name in self._ids:
            raise ValueError(f"Table '{table.name}' already exists")
        self._ids[table.name] = len(self.tables)
        self.tables.append(table)
        return self._ids[table.name]

    def table_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise UnknownTableError(f"Unknown table '{name}'") from None

    def table(self, name: str) -> Table:
        return self.tables[self.table_id(name)]

    def schema(self, name: str) -> TableSchema:
        return self.table(name).schema

    def open_cursor(self, table_id: int) -> Cursor:
        table = self.tables[table_id]
        n_rows = len(table.rows)
        return Cursor(table_id=table_id, rows=table.rows, n_rows=n_rows,
                      n_columns=len(table.schema.columns), row_index=0, at_end=n_rows == 0)
