"""
Tests for hot-loop detection, region emission, external compilation and
the JIT driver
"""

import math

import pytest

from backends.protocol import CollectingSink
from backends.run import run_backend
from conftest import plan_text
from errors import AlreadyInstalled, CompileFailed, LoadFailed, NonTerminatingRegion, UnsupportedOpcode
from examples import FILTER_QUERY, small_database
from extractor.library import default_library
from jit.compiler import compile_region
from jit.config import JitConfig, JitMode, parse_threshold
from jit.detector import LoopDetector, Region
from jit.emitter import emit_region_source, region_name
from jit.engine import run_jit
from jit.loader import install, load_region, loaded_modules
from storage.generate import generate_mixed_table, generate_table
from storage.schema import Database
from vm.opcodes import Opcode
from vm.program import Op, Program
from vm.state import Exit, Row, VmState


def jit_rows(db, text, config, mode=JitMode.GENERIC):
    sink = CollectingSink()
    stats = run_jit(plan_text(db, text), db, sink, config.with_overrides(mode=mode))
    return sink.rows, stats


def switch_rows(db, text):
    sink = CollectingSink()
    run_backend("switch", plan_text(db, text), db, sink)
    return sink.rows


# --------------------------------------------------------------- detector

def test_detector_fires_once_after_threshold(filter_program):
    detector = LoopDetector(threshold=3)
    results = [detector.observe_jump(filter_program, 9, 5) for _ in range(8)]
    assert results[:3] == [None, None, None]
    assert results[3] == Region(5, 9)
    assert results[4:] == [None] * 4
    assert filter_program.ops[5].hot_count == 8


def test_detector_ignores_forward_jumps(filter_program):
    detector = LoopDetector(threshold=1)
    for _ in range(5):
        assert detector.observe_jump(filter_program, 6, 9) is None
    assert filter_program.ops[9].hot_count == 0


def test_region_bounds():
    region = Region(5, 9)
    assert 5 in region and 9 in region and 10 not in region
    assert len(region) == 5


@pytest.mark.parametrize("threshold", [1, 2, 8])
def test_compile_needs_threshold_plus_two_rows(threshold, tmp_path):
    config = JitConfig(threshold=threshold, temp_dir=tmp_path)
    _, cold = jit_rows(Database([generate_table(threshold + 1, seed=1)]), FILTER_QUERY, config)
    _, hot = jit_rows(Database([generate_table(threshold + 2, seed=1)]), FILTER_QUERY, config)
    assert cold.compilations == 0
    assert hot.compilations == 1


def test_infinite_threshold_never_compiles(tmp_path):
    config = JitConfig(threshold="inf", temp_dir=tmp_path)
    rows, stats = jit_rows(Database([generate_table(500, seed=2)]), FILTER_QUERY, config)
    assert stats.compilations == 0 and stats.region_entries == 0
    assert len(rows) == len(switch_rows(Database([generate_table(500, seed=2)]), FILTER_QUERY))


# ---------------------------------------------------------------- driver

def test_hot_loop_runs_compiled(jit_config):
    table = generate_table(400, seed=9, value_range=(0, 40))
    db = Database([table])
    rows, stats = jit_rows(db, FILTER_QUERY, jit_config)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.compilations == 1
    assert stats.compile_failures == 0
    assert stats.region_entries >= 1
    assert 0 < stats.region_rows <= stats.rows_emitted
    assert stats.compile_ns > 0


def test_broken_toolchain_falls_back(tmp_path):
    config = JitConfig(threshold=1, temp_dir=tmp_path, toolchain_command=("/nonexistent/cc",))
    db = Database([generate_table(300, seed=6)])
    rows, stats = jit_rows(db, FILTER_QUERY, config)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.compile_failures >= 1
    assert stats.compilations == 0


def test_failing_compiler_falls_back(tmp_path):
    config = JitConfig(threshold=1, temp_dir=tmp_path, toolchain_command=("false",))
    db = Database([generate_table(300, seed=6)])
    rows, stats = jit_rows(db, FILTER_QUERY, config)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.compile_failures == 1
    assert stats.compilations == 0
    assert stats.region_entries == 0


def test_load_failure_falls_back(tmp_path, monkeypatch):
    def refuse(compiled):
        raise LoadFailed(f"cannot load {compiled.name}")

    monkeypatch.setattr("jit.loader.load_region", refuse)
    config = JitConfig(threshold=1, temp_dir=tmp_path)
    db = Database([generate_table(300, seed=6)])
    rows, stats = jit_rows(db, FILTER_QUERY, config)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.compile_failures == 1
    assert stats.compilations == 0
    assert stats.region_entries == 0


def test_min_remaining_rows_skips_compilation(tmp_path):
    config = JitConfig(threshold=1, temp_dir=tmp_path, min_remaining_rows=10 ** 6)
    db = Database([generate_table(50, seed=1)])
    rows, stats = jit_rows(db, FILTER_QUERY, config)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.compilations == 0
    assert stats.compilations_skipped == 1


def test_specialized_deopts_on_text(jit_config):
    db = Database([generate_mixed_table(500, seed=3, text_fraction=0.2)])
    generic, _ = jit_rows(db, FILTER_QUERY, jit_config)
    specialized, stats = jit_rows(db, FILTER_QUERY, jit_config, JitMode.SPECIALIZED)
    assert specialized == generic == switch_rows(db, FILTER_QUERY)
    assert stats.deopts > 0


def test_specialized_on_ints_never_deopts(jit_config):
    db = Database([generate_table(500, seed=3)])
    rows, stats = jit_rows(db, FILTER_QUERY, jit_config, JitMode.SPECIALIZED)
    assert rows == switch_rows(db, FILTER_QUERY)
    assert stats.deopts == 0


def test_keep_artifacts(tmp_path):
    db = Database([generate_table(50, seed=1)])
    jit_rows(db, FILTER_QUERY, JitConfig(threshold=1, temp_dir=tmp_path / "kept", keep_artifacts=True))
    jit_rows(db, FILTER_QUERY, JitConfig(threshold=1, temp_dir=tmp_path / "dropped"))
    assert list((tmp_path / "kept").glob("build-*/region_*.py"))
    assert not list((tmp_path / "dropped").glob("build-*/region_*.py"))
    assert list((tmp_path / "dropped").glob("build-*/region_*.pyc"))


# ---------------------------------------------------------------- emitter

def test_filter_region_source(filter_program):
    source = emit_region_source(filter_program, Region(5, 9), default_library())
    # five instructions plus the Column's local label
    assert source.count("if lbl == ") == 6
    assert "return Exit(10)" in source
    assert "lbl = 5\n" in source and "continue" in source
    assert "Deopt(" not in source
    assert region_name(filter_program, Region(5, 9)).endswith("_5_9")


def test_specialized_region_carries_guard(filter_program):
    source = emit_region_source(filter_program, Region(5, 9), default_library(), specialized=True)
    assert "return Deopt(6)" in source


def test_region_without_exit():
    program = Program([Op(Opcode.Init, p2=1), Op(Opcode.Goto, p2=1), Op(Opcode.Halt)], register_count=1)
    with pytest.raises(NonTerminatingRegion):
        emit_region_source(program, Region(1, 1), default_library())


def test_interpret_only_opcode(filter_program):
    library = default_library()
    restricted = type(library)(library.semantics_sha256, library.prologue, library.groups,
                               interpret_only=frozenset({Opcode.Copy}))
    with pytest.raises(UnsupportedOpcode):
        emit_region_source(filter_program, Region(5, 9), restricted)


# ------------------------------------------------------ compiler, loader

def test_compile_and_load_region(filter_program, jit_config):
    source = emit_region_source(filter_program, Region(5, 9), default_library())
    compiled = compile_region(source, region_name(filter_program, Region(5, 9)), jit_config)
    assert compiled.module_path.exists()
    assert compiled.source_path is None
    entry = load_region(compiled)
    assert any(key.startswith(compiled.name) for key in loaded_modules())

    db = small_database()
    state = VmState.for_program(filter_program)
    state.registers[1] = 20
    state.cursors[0] = db.open_cursor(0)
    assert entry(state, db, filter_program.ops) == Row(3, 1, 9)
    assert state.registers[3] == 5


def test_region_exits_at_loop_end(filter_program, jit_config):
    source = emit_region_source(filter_program, Region(5, 9), default_library())
    entry = load_region(compile_region(source, "region_exit_test", jit_config))
    db = small_database(values=(30, 40))
    state = VmState.for_program(filter_program)
    state.registers[1] = 20
    state.cursors[0] = db.open_cursor(0)
    assert entry(state, db, filter_program.ops) == Exit(10)


def test_compile_failure(jit_config):
    with pytest.raises(CompileFailed):
        compile_region("def region(state, db, aOp):\n    return (\n", "region_broken", jit_config)


def test_corrupted_module(filter_program, jit_config):
    source = emit_region_source(filter_program, Region(5, 9), default_library())
    compiled = compile_region(source, "region_corrupted", jit_config)
    compiled.module_path.write_bytes(b"not bytecode")
    with pytest.raises(LoadFailed):
        load_region(compiled)


def test_install_twice(filter_program):
    install(filter_program, 5, lambda state, db, aOp: None)
    with pytest.raises(AlreadyInstalled):
        install(filter_program, 5, lambda state, db, aOp: None)
    filter_program.reset_hot_state()
    assert filter_program.ops[5].compiled_entry is None


# ----------------------------------------------------------------- config

def test_config_from_env():
    config = JitConfig.from_env({"QJIT_THRESHOLD": "inf", "QJIT_OPT": "2", "QJIT_TOOLCHAIN": "mycc -x"})
    assert math.isinf(config.threshold)
    assert config.opt_level == "2"
    assert config.toolchain_command == ("mycc", "-x")
    assert JitConfig.from_env({"QJIT_THRESHOLD": "3"}, threshold=5).threshold == 5
    assert JitConfig.from_env({"QJIT_THRESHOLD": "3"}, threshold=None).threshold == 3


@pytest.mark.parametrize("text", ["0", "-4", "hot", ""])
def test_bad_threshold(text):
    with pytest.raises(ValueError):
        parse_threshold(text)


def test_bad_opt_level():
    with pytest.raises(ValueError):
        JitConfig(opt_level="3")
