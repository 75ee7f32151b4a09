"""
Tests for the benchmark harness, its CSV records and the speedup report
"""

import pytest

from backends.run import Backend
from bench.experiments import (Bench, bound_for_selectivity, check_agreement, run_experiment_a, run_experiment_b,
                               run_experiment_c)
from bench.records import BenchRecord, parse_records, read_records, records_to_csv, write_records
from bench.report import report, summarize
from errors import BenchmarkMismatch, FormatError
from examples import small_table
from jit.config import JitConfig
from planner.benchgen import gen_bench_query
from storage.generate import generate_table
from storage.schema import Database

HEADER = "experiment,backend,loop_ops,selectivity,rows_out,wall_ms,cpu_ms,compile_ms,runs\n"

EXP_A_CSV = HEADER + (
    "A,switch,10,0.000,0,40.000,40.000,0.000,5\n"
    "A,jit,10,0.000,0,52.000,50.000,3.000,5\n"
    "A,switch,60,0.000,0,180.000,170.000,0.000,5\n"
    "A,jit,60,0.000,0,110.000,100.000,3.000,5\n"
    "A,threaded,60,0.000,0,150.000,136.000,0.000,5\n"
)

EXP_B_CSV = HEADER + (
    "B,switch,66,0.000,0,10.000,10.000,0.000,3\n"
    "B,switch,66,1.000,1000,30.000,30.000,0.000,3\n"
    "B,jit,66,0.000,0,10.000,10.000,2.000,3\n"
    "B,jit,66,1.000,1000,20.000,20.000,2.000,3\n"
)


@pytest.fixture
def bench(tmp_path):
    db = Database([generate_table(300, seed=1)])
    return Bench(db=db, runs=1, config=JitConfig(threshold=1, temp_dir=tmp_path))


# ---------------------------------------------------------------- records

def test_records_round_trip(tmp_path):
    records = [
        BenchRecord("A", "switch", 10, 0.0, 0, 1.5, 1.25, 0.0, 5),
        BenchRecord("B", "jit", 66, 0.4, 400, 12.125, 11.0, 2.5, 3),
    ]
    path = tmp_path / "records.csv"
    write_records(records, path)
    assert read_records(path) == records
    assert records_to_csv(records).startswith(HEADER)


def test_record_validation():
    with pytest.raises(ValueError):
        BenchRecord("D", "switch", 10, 0.0, 0, 1.0, 1.0, 0.0, 1)
    with pytest.raises(ValueError):
        BenchRecord("A", "switch", 10, 0.0, 0, 1.0, 1.0, 0.0, 0)


@pytest.mark.parametrize("text", [
    "",
    HEADER,
    "backend,experiment\nswitch,A\n",
    HEADER + "A,switch,ten,0.000,0,1.000,1.000,0.000,5\n",
    HEADER + "A,switch,10,0.000,0\n",
])
def test_malformed_csv(text):
    with pytest.raises(FormatError):
        parse_records(text)


# ----------------------------------------------------------------- report

def test_report_max_speedup(tmp_path):
    path = tmp_path / "exp_a.csv"
    path.write_text(EXP_A_CSV)
    summary = report(path)
    best = summary.max_speedups[("A", "jit")]
    assert best.speedup == pytest.approx(1.7)
    assert best.loop_ops == 60
    assert "[A] max jit speedup: 1.70x (loop_ops=60)" in summary.lines()
    assert summary.max_speedups[("A", "threaded")].speedup == pytest.approx(1.25)
    assert ("A", "switch") not in summary.max_speedups


def test_report_selectivity_slopes():
    summary = summarize(parse_records(EXP_B_CSV))
    assert summary.slopes["switch"] == pytest.approx(20.0)
    assert summary.slopes["jit"] == pytest.approx(10.0)
    assert summary.slope_ratio == pytest.approx(0.5)
    assert "[B] jit/switch slope ratio: 0.50" in summary.lines()


def test_report_without_baseline():
    records = parse_records(HEADER + "A,jit,10,0.000,0,1.000,1.000,0.000,1\n")
    summary = summarize(records)
    assert summary.max_speedups == {}
    assert summary.slope_ratio is None


def test_report_of_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(FormatError):
        report(path)


# ------------------------------------------------------------ experiments

def test_bound_for_selectivity():
    table = small_table(values=tuple(reversed(range(100))))
    assert bound_for_selectivity(table, 0.0) == 0
    assert bound_for_selectivity(table, 0.3) == 30
    assert bound_for_selectivity(table, 1.0) == 100
    with pytest.raises(ValueError):
        bound_for_selectivity(table, 1.5)


def test_check_agreement():
    agree = [BenchRecord("A", b, 10, 0.0, 0, 1.0, 1.0, 0.0, 1) for b in ("switch", "jit")]
    check_agreement(agree)
    disagree = agree + [BenchRecord("A", "threaded", 10, 0.0, 3, 1.0, 1.0, 0.0, 1)]
    with pytest.raises(BenchmarkMismatch):
        check_agreement(disagree)


def test_bench_rejects_zero_runs():
    with pytest.raises(ValueError):
        Bench(db=Database([generate_table(10, seed=1)]), runs=0)


def test_experiment_a(bench):
    records = run_experiment_a(bench, [10, 20])
    assert [(r.loop_ops, r.backend) for r in records] == [
        (10, "switch"), (10, "threaded"), (10, "jit"),
        (20, "switch"), (20, "threaded"), (20, "jit"),
    ]
    assert all(r.rows_out == 0 and r.runs == 1 and r.experiment == "A" for r in records)
    assert all(r.cpu_ms >= 0 for r in records)


def test_experiment_b(bench):
    records = run_experiment_b(bench, [0.0, 0.5], target_loop_ops=20)
    assert {r.loop_ops for r in records} == {20}
    empty = [r for r in records if r.selectivity == 0.0]
    half = [r for r in records if r.selectivity == 0.5]
    assert {r.rows_out for r in empty} == {0}
    bound = bound_for_selectivity(bench.db.tables[0], 0.5)
    expected = sum(1 for (value,) in bench.db.tables[0].rows if value < bound)
    assert {r.rows_out for r in half} == {expected}
    assert expected >= 150


def test_experiment_c(bench):
    records = run_experiment_c(bench, [10])
    assert [r.backend for r in records] == ["switch", "jit", "jit-specialized"]
    assert {r.rows_out for r in records} == {0}


def test_fresh_process_measurement(bench):
    bench.fresh_process = True
    text = gen_bench_query(1, bound=100)
    expected = sum(1 for (value,) in bench.db.tables[0].rows if value < 100)
    for backend in (Backend.SWITCH, Backend.JIT):
        measurement = bench.measure(text, backend)
        assert measurement.rows_out == expected
        assert measurement.runs == 1
