"""
Predefined queries and datasets
"""

from planner.benchgen import gen_bench_query
from storage.schema import ColumnDef, ColumnType, Database, Table, TableSchema

# The scan-filter-project query used throughout the tests and docs
FILTER_QUERY = "SELECT i FROM test WHERE i<20"

EXAMPLE_QUERIES = {
    '1': {
        'name': 'Single comparison',
        'query': FILTER_QUERY,
    },
    '2': {
        'name': 'Range',
        'query': "SELECT i FROM test WHERE i>=5 AND i<=10",
    },
    '3': {
        'name': 'Two unsatisfiable pairs (empty result)',
        'query': gen_bench_query(2),
    },
    '4': {
        'name': 'Two unsatisfiable pairs and a bound',
        'query': gen_bench_query(2, bound=10),
    },
    '5': {
        'name': 'No WHERE clause',
        'query': "SELECT i FROM test",
    },
}


def small_table(values=(5, 25, 7), name: str = "test") -> Table:
    """Single Int column 'i' holding the given values in order."""
    return Table(TableSchema.single_int(name, "i"), [(value,) for value in values])


def small_database(values=(5, 25, 7)) -> Database:
    return Database([small_table(values)])


def mixed_table(name: str = "test") -> Table:
    """Any-typed column holding Int, Text and Null values."""
    schema = TableSchema(name, (ColumnDef("i", ColumnType.ANY),))
    return Table(schema, [(3,), ("abc",), (30,), (None,), (7,), ("z",), (19,), (20,)])
