"""
Tests for the query parser, plan generation and the benchmark query generator
"""

import pytest

from backends.protocol import CollectingSink
from backends.switch import run_switch
from conftest import oracle_rows, plan_text
from errors import NoLoopError, QuerySyntaxError, UnknownColumnError, UnknownTableError
from examples import small_database, small_table
from planner.benchgen import gen_bench_query, loop_ops_for, pairs_for_loop_ops
from planner.codegen import count_loop_ops, plan
from planner.parser import MAX_DNF_GROUPS, Comparison, format_query, parse_query
from storage.schema import ColumnDef, Database, Table, TableSchema
from vm.opcodes import Opcode
from vm.program import Op, Program

FIVE_PAIR_QUERY = "SELECT i FROM test WHERE (i<1 AND i>6) OR (i<101 AND i>106) OR (i<201 AND i>206)"


# ---------------------------------------------------------------- parser

def test_parse_single_comparison():
    query = parse_query("SELECT i FROM test WHERE i<20;")
    assert (query.column, query.table) == ("i", "test")
    assert query.predicate == ((Comparison("i", "<", 20),),)


def test_parse_or_of_ands():
    query = parse_query(FIVE_PAIR_QUERY)
    assert len(query.predicate) == 3
    assert all(len(group) == 2 for group in query.predicate)
    assert query.predicate[2] == (Comparison("i", "<", 201), Comparison("i", ">", 206))


def test_parse_without_where():
    assert parse_query("select i from test").predicate is None


def test_parse_keywords_case_insensitive_and_negative_literals():
    query = parse_query("select i FROM test where i > -1 and i <= 5")
    assert query.predicate == ((Comparison("i", ">", -1), Comparison("i", "<=", 5)),)


def test_and_distributes_over_or():
    query = parse_query("SELECT i FROM test WHERE (i<1 OR i>5) AND i<>3")
    assert query.predicate == (
        (Comparison("i", "<", 1), Comparison("i", "<>", 3)),
        (Comparison("i", ">", 5), Comparison("i", "<>", 3)),
    )


@pytest.mark.parametrize("text, line, column", [
    ("SELECT FROM test", 1, 8),
    ("SELECT i FROM test WHERE i <", 1, 29),
    ("SELECT i FROM test WHERE i ! 3", 1, 28),
    ("SELECT i\nFROM test WHERE i<20 extra", 2, 22),
])
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(QuerySyntaxError) as info:
        parse_query(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_literal_out_of_range():
    with pytest.raises(QuerySyntaxError):
        parse_query(f"SELECT i FROM test WHERE i<{2 ** 63}")


def or_factors(n: int) -> str:
    return " AND ".join(["(i<1 OR i>2)"] * n)


def test_and_of_ors_is_capped():
    assert len(parse_query(f"SELECT i FROM test WHERE {or_factors(12)}").predicate) == MAX_DNF_GROUPS
    with pytest.raises(QuerySyntaxError) as info:
        parse_query(f"SELECT i FROM test WHERE {or_factors(18)}")
    assert (info.value.line, info.value.column) == (1, 20)


def test_format_query_parses_back():
    query = parse_query(FIVE_PAIR_QUERY)
    assert parse_query(format_query(query)) == query


# --------------------------------------------------------------- codegen

def test_filter_plan_shape(filter_program):
    assert [op.opcode for op in filter_program.ops] == [
        Opcode.Init, Opcode.Transaction, Opcode.Integer, Opcode.OpenRead, Opcode.Rewind, Opcode.Column,
        Opcode.Ge, Opcode.Copy, Opcode.ResultRow, Opcode.Next, Opcode.Halt,
    ]
    ops = filter_program.ops
    head = filter_program.main_loop_head
    assert ops[head].opcode == Opcode.Column
    assert ops[2].p1 == 20
    # the negated comparison skips to Next, Next loops back to the Column
    assert ops[6].p2 == 9 and ops[6].p1 == ops[2].p2 and ops[6].p3 == ops[5].p3
    assert ops[9].p2 == head
    assert ops[4].p2 == 10
    assert count_loop_ops(filter_program) == 5


def test_plan_without_predicate():
    program = plan_text(small_database(), "SELECT i FROM test")
    loop = [op.opcode for op in program.ops[program.main_loop_head:program.layout.next + 1]]
    assert loop == [Opcode.Column, Opcode.Copy, Opcode.ResultRow, Opcode.Next]
    assert count_loop_ops(program) == 4


def test_three_pair_query_matches_oracle():
    table = small_table(values=(0, 3, 150, 203, 204, 1000, 205, 7, 2, 206))
    db = Database([table])
    program = plan_text(db, FIVE_PAIR_QUERY)
    assert count_loop_ops(program) == 10
    sink = CollectingSink()
    run_switch(program, db, sink)
    assert sink.rows == oracle_rows(table, parse_query(FIVE_PAIR_QUERY)) == []


def test_or_groups_select_union():
    table = small_table(values=(0, 3, 150, 203, 204, 1000, 205, 7, 2, 206))
    db = Database([table])
    text = "SELECT i FROM test WHERE (i>100 AND i<204) OR i=7 OR i<=2"
    sink = CollectingSink()
    run_switch(plan_text(db, text), db, sink)
    assert sink.rows == oracle_rows(table, parse_query(text)) == [[0], [150], [203], [7], [2]]


def test_repeated_literals_share_a_register():
    program = plan_text(small_database(), "SELECT i FROM test WHERE i>5 AND i<>5")
    assert sum(op.opcode == Opcode.Integer for op in program.ops) == 1


WIDE_LITERAL_QUERY = "SELECT i FROM test WHERE i<3000000000 AND i>-9223372036854775808"


def test_wide_literals_load_through_int64():
    program = plan(parse_query(WIDE_LITERAL_QUERY), small_table().schema)
    loads = {op.opcode: op for op in program.ops[program.layout.integers[0]:program.layout.integers[1]]}
    assert set(loads) == {Opcode.Int64}
    assert all(-2 ** 31 <= operand < 2 ** 31 for op in program.ops for operand in (op.p1, op.p2, op.p3))


def test_wide_literals_filter_rows():
    table = small_table(values=(-2 ** 63, 2 ** 62, 2999999999, 3000000000, -5))
    db = Database([table])
    sink = CollectingSink()
    run_switch(plan_text(db, WIDE_LITERAL_QUERY), db, sink)
    assert sink.rows == oracle_rows(table, parse_query(WIDE_LITERAL_QUERY)) == [[2999999999], [-5]]


def test_unknown_names():
    db = small_database()
    with pytest.raises(UnknownTableError):
        plan(parse_query("SELECT i FROM other"), db.tables[0].schema)
    with pytest.raises(UnknownColumnError):
        plan(parse_query("SELECT j FROM test"), db.tables[0].schema)
    with pytest.raises(UnknownColumnError):
        plan(parse_query("SELECT i FROM test WHERE j<3"), db.tables[0].schema)


def test_projection_of_another_column():
    schema = TableSchema("t", (ColumnDef("a"), ColumnDef("b")))
    table = Table(schema, [(1, 10), (2, 20), (3, 30)])
    db = Database([table])
    text = "SELECT b FROM t WHERE a>=2"
    sink = CollectingSink()
    run_switch(plan_text(db, text), db, sink)
    assert sink.rows == [[20], [30]]


def test_count_loop_ops_without_loop():
    with pytest.raises(NoLoopError):
        count_loop_ops(Program([Op(Opcode.Halt)], register_count=1))


# ------------------------------------------------------------- benchgen

def test_bench_query_three_pairs():
    assert gen_bench_query(3) == FIVE_PAIR_QUERY


def test_bench_query_without_pairs():
    assert gen_bench_query(0) == "SELECT i FROM test WHERE (i<0 AND i>1)"


def test_bench_query_with_bound():
    text = gen_bench_query(1, bound=2000)
    table = small_table(values=(5, 1999, 2000, 2500, 0, 3))
    db = Database([table])
    sink = CollectingSink()
    run_switch(plan_text(db, text), db, sink)
    assert sink.rows == [[5], [1999], [0], [3]]


@pytest.mark.parametrize("pairs", range(0, 31))
def test_loop_ops_formula(pairs):
    program = plan_text(small_database(), gen_bench_query(pairs))
    assert count_loop_ops(program) == loop_ops_for(pairs) == 2 * max(pairs, 1) + 4


@pytest.mark.parametrize("target, with_bound, expected", [
    (10, False, 3),
    (60, False, 28),
    (64, False, 30),
    (65, True, 30),
    (6, False, 1),
])
def test_pairs_for_loop_ops(target, with_bound, expected):
    assert pairs_for_loop_ops(target, with_bound) == expected


def test_pairs_for_loop_ops_too_short():
    with pytest.raises(ValueError):
        pairs_for_loop_ops(5)
