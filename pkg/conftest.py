"""
Shared fixtures: small tables, the filter program, a JIT configuration
writing into tmp_path, and a brute-force row filter used as the oracle.
"""

import operator

import pytest

from examples import FILTER_QUERY, small_database
from jit.config import JitConfig
from planner.codegen import plan
from planner.parser import QueryAst, parse_query
from storage.schema import Database, Table
from vm.values import mem_compare

collect_ignore = ["examples"]

RELATIONS = {
    "=": operator.eq,
    "<>": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def oracle_rows(table: Table, query: QueryAst) -> list[list]:
    """Rows the query selects, computed row by row under the value order."""
    selected = table.schema.column_index(query.column)
    out = []
    for row in table.rows:
        if query.predicate is None or any(
                all(RELATIONS[atom.op](mem_compare(row[table.schema.column_index(atom.column)], atom.value), 0)
                    for atom in group)
                for group in query.predicate):
            out.append([row[selected]])
    return out


def plan_text(db: Database, text: str):
    query = parse_query(text)
    table_id = db.table_id(query.table)
    return plan(query, db.tables[table_id].schema, table_id, text)


@pytest.fixture
def small_db() -> Database:
    return small_database()


@pytest.fixture
def filter_program(small_db):
    return plan_text(small_db, FILTER_QUERY)


@pytest.fixture
def jit_config(tmp_path) -> JitConfig:
    return JitConfig(threshold=1, temp_dir=tmp_path / "jit")
