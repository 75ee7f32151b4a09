"""
Cross-backend tests: every backend must produce the rows of the oracle,
in table order, and the same run statistics where they are comparable.
"""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from backends.protocol import CollectingSink, CountingSink
from backends.run import BACKEND_NAMES, run_backend
from backends.step import step
from conftest import oracle_rows, plan_text
from errors import VmRuntimeError
from examples import EXAMPLE_QUERIES, FILTER_QUERY, mixed_table, small_database, small_table
from jit.config import JitConfig
from planner.benchgen import gen_bench_query
from planner.parser import parse_query
from storage.generate import generate_table
from storage.schema import Database
from vm.opcodes import ErrorCode, Opcode
from vm.program import Op, Program
from vm.state import Row, VmState, VmStatus

# Hypothesis reuses one configuration across examples; tmp_path is per test.
SHARED_JIT = JitConfig(threshold=1)


def run_rows(backend, db, text, config=SHARED_JIT, **kwargs):
    sink = CollectingSink()
    stats = run_backend(backend, plan_text(db, text), db, sink, config, **kwargs)
    return sink.rows, stats


def stepped_counts(program, db):
    """(rows, instructions) of the program executed one step() at a time."""
    state = VmState.for_program(program)
    rows = instructions = 0
    while state.status is not VmStatus.HALTED:
        outcome = step(state, db, program)
        instructions += 1
        rows += isinstance(outcome, Row)
    return rows, instructions


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_filter_query(backend, jit_config):
    rows, stats = run_rows(backend, small_database(), FILTER_QUERY, jit_config)
    assert rows == [[5], [7]]
    assert stats.rows_emitted == 2
    assert not stats.aborted


@pytest.mark.parametrize("backend", BACKEND_NAMES)
@pytest.mark.parametrize("key", sorted(EXAMPLE_QUERIES))
def test_example_queries(backend, key, jit_config):
    table = generate_table(300, seed=11, value_range=(0, 30))
    db = Database([table])
    text = EXAMPLE_QUERIES[key]['query']
    rows, _ = run_rows(backend, db, text, jit_config)
    assert rows == oracle_rows(table, parse_query(text))


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_empty_table(backend, jit_config):
    rows, stats = run_rows(backend, small_database(values=()), FILTER_QUERY, jit_config)
    assert rows == []
    assert stats.compilations == 0


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_sink_abort(backend, jit_config):
    db = small_database()
    sink = CollectingSink(limit=1)
    stats = run_backend(backend, plan_text(db, FILTER_QUERY), db, sink, jit_config)
    assert sink.rows == [[5]]
    assert stats.rows_emitted == 1
    assert stats.aborted


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_mixed_values(backend, jit_config):
    table = mixed_table()
    db = Database([table])
    rows, _ = run_rows(backend, db, FILTER_QUERY, jit_config)
    assert rows == oracle_rows(table, parse_query(FILTER_QUERY)) == [[3], [None], [7], [19]]


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_wide_literals(backend, jit_config):
    table = small_table(values=(2 ** 40, -2 ** 40, 5, 2 ** 40 + 1, 7 - 2 ** 33))
    text = f"SELECT i FROM test WHERE i<={2 ** 40} AND i>{-2 ** 35}"
    rows, _ = run_rows(backend, Database([table]), text, jit_config)
    assert rows == [[2 ** 40], [5], [7 - 2 ** 33]]


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_runtime_error(backend, jit_config):
    program = Program([Op(Opcode.Column, p1=0, p2=0, p3=1), Op(Opcode.Halt)], register_count=2)
    with pytest.raises(VmRuntimeError) as info:
        run_backend(backend, program, small_database(), CollectingSink(), jit_config)
    assert info.value.code is ErrorCode.NO_CURSOR
    assert info.value.pc == 0


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_bad_register_reports_faulting_pc(backend, jit_config):
    program = Program([Op(Opcode.Init, p2=1), Op(Opcode.Transaction), Op(Opcode.Integer, p1=1, p2=9), Op(Opcode.Halt)],
                      register_count=2)
    with pytest.raises(VmRuntimeError) as info:
        run_backend(backend, program, small_database(), CollectingSink(), jit_config)
    assert info.value.code is ErrorCode.BAD_REGISTER
    assert info.value.pc == 2


def test_unknown_backend():
    db = small_database()
    with pytest.raises(ValueError):
        run_backend("vectorized", plan_text(db, FILTER_QUERY), db, CollectingSink())


def test_instruction_counts_agree(jit_config):
    table = generate_table(200, seed=4)
    db = Database([table])
    text = gen_bench_query(3, bound=50)
    counts = {}
    for backend in BACKEND_NAMES:
        stats = run_backend(backend, plan_text(db, text), db, CountingSink(), jit_config,
                            count_instructions=True)
        counts[backend] = (stats.rows_emitted, stats.instructions_retired)
    assert set(counts.values()) == {stepped_counts(plan_text(db, text), db)}


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(n_rows=st.integers(min_value=1000, max_value=3000),
       seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
       high=st.integers(min_value=1, max_value=5000),
       pairs=st.integers(min_value=0, max_value=30),
       bound=st.one_of(st.none(), st.integers(min_value=0, max_value=5000)))
def test_backends_agree_with_oracle(n_rows, seed, high, pairs, bound):
    db = Database([generate_table(n_rows, seed, value_range=(0, high))])
    text = gen_bench_query(pairs, bound)
    expected = oracle_rows(db.tables[0], parse_query(text))
    for backend in BACKEND_NAMES:
        rows, _ = run_rows(backend, db, text)
        assert rows == expected, backend


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.one_of(st.none(), st.integers(min_value=-5, max_value=300)), max_size=40),
       pairs=st.integers(min_value=0, max_value=3),
       bound=st.one_of(st.none(), st.integers(min_value=0, max_value=300)))
def test_backends_agree_on_small_tables(values, pairs, bound):
    db = small_database(values)
    text = gen_bench_query(pairs, bound)
    expected = oracle_rows(db.tables[0], parse_query(text))
    for backend in BACKEND_NAMES:
        rows, _ = run_rows(backend, db, text)
        assert rows == expected, backend
